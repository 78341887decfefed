#include "bgeps/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <stdexcept>

#include "bgeps/parallel.hpp"
#include "bgeps/rng.hpp"

namespace bgeps {

namespace {

std::pair<double, double> draw_pair(const BgepsParams& p, std::uint64_t seed, std::size_t i) {
  SplitMix64 rng = SplitMix64::substream(seed, i);
  const double n = static_cast<double>(p.family.sample_n(p.theta, rng));
  const double z1 = ge_quantile({n * p.alpha1, p.lambda}, rng.next_open01());
  const double z2 = ge_quantile({n * p.alpha2, p.lambda}, rng.next_open01());
  const double z3 = ge_quantile({n * p.alpha3, p.lambda}, rng.next_open01());
  return {std::max(z1, z3), std::max(z2, z3)};
}

}  // namespace

BivariateSample sample(const SimulationConfig& config) {
  validate(config.params);
  if (config.n_draws < 1) throw std::invalid_argument("sample: n_draws must be >= 1");
  std::vector<std::pair<double, double>> pairs(config.n_draws);
  // Exceptions cannot leave an OpenMP region; stash the first one and
  // rethrow after the loop.
  std::exception_ptr error;
  std::atomic<bool> has_error{false};
  parallel_for_index(static_cast<std::ptrdiff_t>(config.n_draws), [&](std::size_t i) {
    try {
      pairs[i] = draw_pair(config.params, config.seed, i);
    } catch (...) {
      if (!has_error.exchange(true)) error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);
  return BivariateSample::from_pairs(pairs);
}

BivariateSample sample_serial(const SimulationConfig& config) {
  validate(config.params);
  if (config.n_draws < 1) throw std::invalid_argument("sample: n_draws must be >= 1");
  std::vector<std::pair<double, double>> pairs(config.n_draws);
  for (std::size_t i = 0; i < config.n_draws; ++i)
    pairs[i] = draw_pair(config.params, config.seed, i);
  return BivariateSample::from_pairs(pairs);
}

}  // namespace bgeps
