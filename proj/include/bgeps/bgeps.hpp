#pragma once

#include <utility>

#include "bgeps/ge.hpp"
#include "bgeps/power_series.hpp"
#include "bgeps/sample.hpp"

namespace bgeps {

// Parameters of the compound bivariate class: three GE shapes, a shared
// rate, and the power-series parameter theta (carried but unused by the
// degenerate family).
struct BgepsParams {
  double alpha1;
  double alpha2;
  double alpha3;
  double lambda;
  double theta;
  PowerSeriesFamily family;

  double alpha_sum() const { return alpha1 + alpha2 + alpha3; }
};

void validate(const BgepsParams& p);

// Density branch: per-area off the diagonal, per-length on it.
enum class Branch { F1, F2, F0 };

struct DensityValue {
  Branch branch;
  double value;
  double log_value;
};

double joint_cdf(const BgepsParams& p, double y1, double y2);
DensityValue joint_pdf(const BgepsParams& p, double y1, double y2);

// (absolutely continuous mass, singular mass); sums to 1.
std::pair<double, double> decomposition_weights(const BgepsParams& p);

double marginal_cdf(const BgepsParams& p, int which, double y);
double max_cdf(const BgepsParams& p, double y);

// P(Y1 <= y1 | Y2 <= y2).
double conditional_cdf(const BgepsParams& p, double y1, double y2);

double prob_y1_less_y2(const BgepsParams& p);

// Conditional law of the latent count N given an observation.
double cond_n_pmf(const BgepsParams& p, double y1, double y2, long n);
double cond_n_mean(const BgepsParams& p, double y1, double y2);

// Dataset log-likelihood; -inf signals a degenerate evaluation, never a
// crash. The default entry point runs the per-observation terms in
// parallel; the serial variant is the reference used by the tests.
double log_likelihood(const BgepsParams& p, const BivariateSample& data);
double log_likelihood_serial(const BgepsParams& p, const BivariateSample& data);

// theta -> 0 limit: the degenerate-family law with shapes scaled by the
// smallest support point c.
BgepsParams limiting_bge(const BgepsParams& p);

}  // namespace bgeps
