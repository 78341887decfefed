#pragma once

namespace bgeps {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kRngAlgorithm = "splitmix64 (per-draw substreams)";

}  // namespace bgeps
