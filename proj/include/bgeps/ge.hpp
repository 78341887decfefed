#pragma once

#include "bgeps/power_series.hpp"

namespace bgeps {

// Generalized exponential: cdf (1 - e^{-lambda x})^alpha on x > 0.
struct GeParams {
  double alpha;
  double lambda;
};

void validate(const GeParams& p);

double ge_cdf(const GeParams& p, double x);
double ge_log_cdf(const GeParams& p, double x);
double ge_pdf(const GeParams& p, double x);
double ge_log_pdf(const GeParams& p, double x);
// Inverse cdf; u must lie in the open interval (0, 1).
double ge_quantile(const GeParams& p, double u);

// Marginal of the compound class: C(theta * ge_cdf(x)) / C(theta).
double geps_cdf(const GeParams& p, const PowerSeriesFamily& family, double theta, double x);

}  // namespace bgeps
