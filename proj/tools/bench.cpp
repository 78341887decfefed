// Times the OpenMP kernels against their serial reference implementations.
#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "bgeps/density_grid.hpp"
#include "bgeps/em.hpp"
#include "bgeps/sampler.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace bgeps;
using clock_type = std::chrono::steady_clock;

template <class F>
double time_ms(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock_type::now();
    f();
    const auto t1 = clock_type::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-14s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n_obs = 200000;
  std::size_t n_draws = 500000;
  int grid = 300;
  int reps = 3;

  CLI::App app{"serial vs OpenMP kernel timings"};
  app.add_option("--obs", n_obs, "observations for likelihood/E-step kernels");
  app.add_option("--draws", n_draws, "sampler draws");
  app.add_option("--grid", grid, "density grid size");
  app.add_option("--reps", reps, "repetitions (best-of)");
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: not enabled\n");
#endif

  const BgepsParams params{1.2, 0.4, 0.9, 4.0, 0.6, PowerSeriesFamily::geometric()};
  const SimulationConfig cfg{params, n_obs, 20240917};
  const BivariateSample data = sample(cfg);

  std::printf("%-14s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  report("loglik",
         time_ms(reps, [&] { (void)log_likelihood_serial(params, data); }),
         time_ms(reps, [&] { (void)log_likelihood(params, data); }));

  report("e_step",
         time_ms(reps, [&] { (void)e_step_serial(params, data); }),
         time_ms(reps, [&] { (void)e_step(params, data); }));

  const SimulationConfig draw_cfg{params, n_draws, 7};
  report("sampler",
         time_ms(reps, [&] { (void)sample_serial(draw_cfg); }),
         time_ms(reps, [&] { (void)sample(draw_cfg); }));

  report("density_grid",
         time_ms(reps, [&] { (void)density_grid_serial(params, grid, 2.5); }),
         time_ms(reps, [&] { (void)density_grid(params, grid, 2.5); }));

  return 0;
}
