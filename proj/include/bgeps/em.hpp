#pragma once

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bgeps/bgeps.hpp"

namespace bgeps {

// E-step quantities: label-split probabilities and the conditional count
// expectations b_i = E(N | y_1i, y_2i).
struct EmWeights {
  double u1, u2;  // alpha1/(alpha1+alpha3), alpha3/(alpha1+alpha3)
  double v1, v2;  // alpha2/(alpha2+alpha3), alpha3/(alpha2+alpha3)
  std::vector<double> b;
};

EmWeights e_step(const BgepsParams& p, const BivariateSample& data);
EmWeights e_step_serial(const BgepsParams& p, const BivariateSample& data);

// Closed-form shape updates at a fixed rate. Throws std::domain_error when a
// denominator degenerates to zero.
std::array<double, 3> m_step_alphas(const EmWeights& w, const BivariateSample& data,
                                    double lambda);

// Solves theta C'(theta)/C(theta) = mean(b); no-op (returns 1) for the
// degenerate family. Propagates InfeasibleTargetError.
double m_step_theta(const PowerSeriesFamily& family, const EmWeights& w);

// Profile rate update: root of lambda * g(lambda) = m0 + 2 m1 + 2 m2 with
// the shape updates re-evaluated at each trial rate. Brackets around
// lambda_prev, expanding by factors of two up to 2^20.
double m_step_lambda(const EmWeights& w, const BivariateSample& data, double lambda_prev);

// The profiled stationarity residual behind m_step_lambda, exposed so the
// fixed point can be checked independently.
double m_step_lambda_residual(const EmWeights& w, const BivariateSample& data, double lambda);

struct FitOptions {
  std::optional<BgepsParams> init;  // auto-initialized when absent
  double tol = 1e-8;
  int max_iter = 2000;
};

struct FitIterate {
  std::array<double, 5> params;  // alpha1, alpha2, alpha3, lambda, theta
  double loglik;
};

struct FitReport {
  BgepsParams estimates;
  // alpha1, alpha2, alpha3, lambda[, theta]; empty when the observed
  // information matrix was not invertible.
  std::vector<double> standard_errors;
  bool se_ok = false;
  double loglik = -std::numeric_limits<double>::infinity();
  std::vector<FitIterate> trajectory;
  int iterations = 0;
  bool converged = false;
  bool theta_boundary = false;
  int theta_infeasible_events = 0;
  int loglik_decreases = 0;  // iterations where the observed loglik fell by > 1e-6
  double max_scaled_gradient = std::numeric_limits<double>::quiet_NaN();
  std::map<std::string, std::string> metadata;

  int n_params() const { return estimates.family.has_theta_parameter() ? 5 : 4; }
};

// Moment-based starting point: GE fit on max(y1, y2), shapes split evenly
// and scaled down by E(N) at the initial theta.
BgepsParams auto_init(const BivariateSample& data, const PowerSeriesFamily& family);

FitReport fit(const BivariateSample& data, const PowerSeriesFamily& family,
              const FitOptions& options = {});

}  // namespace bgeps
