#pragma once

#include <cstdint>

#include "bgeps/bgeps.hpp"

namespace bgeps {

struct SimulationConfig {
  BgepsParams params;
  std::size_t n_draws;
  std::uint64_t seed;
};

// Exact draws through the latent construction: N from the power series,
// then Z1, Z2, Z3 independent GE with shapes N*alpha_i and the shared rate;
// Y1 = max(Z1, Z3), Y2 = max(Z2, Z3). Ties are exact doubles.
//
// Draw i uses rng substream(seed, i), so output is bit-identical for a
// given seed no matter how many threads run. The serial variant is the
// reference implementation.
BivariateSample sample(const SimulationConfig& config);
BivariateSample sample_serial(const SimulationConfig& config);

}  // namespace bgeps
