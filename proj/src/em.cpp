#include "bgeps/em.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bgeps/math_util.hpp"
#include "bgeps/parallel.hpp"
#include "bgeps/roots.hpp"

namespace bgeps {

namespace {

EmWeights make_weights(const BgepsParams& p, std::size_t m) {
  EmWeights w;
  w.u1 = p.alpha1 / (p.alpha1 + p.alpha3);
  w.u2 = p.alpha3 / (p.alpha1 + p.alpha3);
  w.v1 = p.alpha2 / (p.alpha2 + p.alpha3);
  w.v2 = p.alpha3 / (p.alpha2 + p.alpha3);
  w.b.resize(m);
  return w;
}

std::array<double, 5> param_array(const BgepsParams& p) {
  return {p.alpha1, p.alpha2, p.alpha3, p.lambda, p.theta};
}

// Inverts a small symmetric matrix in place via Gauss-Jordan with partial
// pivoting; returns false when a pivot vanishes.
bool invert_in_place(std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (!(std::fabs(a[pivot][col]) > 1e-300)) return false;
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = a[r][col];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= factor * a[col][j];
        inv[r][j] -= factor * inv[col][j];
      }
    }
  }
  a = std::move(inv);
  return true;
}

struct ParamVector {
  const BivariateSample* data;
  PowerSeriesFamily family;
  bool with_theta;

  BgepsParams to_params(const std::vector<double>& x) const {
    return {x[0], x[1], x[2], x[3], with_theta ? x[4] : 1.0, family};
  }

  double loglik(const std::vector<double>& x) const {
    return log_likelihood(to_params(x), *data);
  }
};

std::vector<double> finite_steps(const ParamVector& pv, const std::vector<double>& x) {
  const double s = pv.family.theta_sup();
  std::vector<double> h(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    h[j] = std::max(1e-5, 1e-4 * std::fabs(x[j]));
    h[j] = std::min(h[j], 0.5 * x[j]);  // all coordinates are positive
    if (pv.with_theta && j == 4 && std::isfinite(s))
      h[j] = std::min(h[j], 0.5 * (s - 1e-12 - x[j]));
    h[j] = std::max(h[j], 1e-12);
  }
  return h;
}

}  // namespace

EmWeights e_step(const BgepsParams& p, const BivariateSample& data) {
  validate(p);
  EmWeights w = make_weights(p, data.size());
  if (p.family.kind() == FamilyKind::Degenerate) {
    std::fill(w.b.begin(), w.b.end(), 1.0);
    return w;
  }
  parallel_for_index(static_cast<std::ptrdiff_t>(data.size()), [&](std::size_t i) {
    w.b[i] = cond_n_mean(p, data.y1[i], data.y2[i]);
  });
  return w;
}

EmWeights e_step_serial(const BgepsParams& p, const BivariateSample& data) {
  validate(p);
  EmWeights w = make_weights(p, data.size());
  if (p.family.kind() == FamilyKind::Degenerate) {
    std::fill(w.b.begin(), w.b.end(), 1.0);
    return w;
  }
  for (std::size_t i = 0; i < data.size(); ++i)
    w.b[i] = cond_n_mean(p, data.y1[i], data.y2[i]);
  return w;
}

std::array<double, 3> m_step_alphas(const EmWeights& w, const BivariateSample& data,
                                    double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("m_step_alphas: lambda must be positive");
  auto q = [&](double y) { return log1mexp(lambda * y); };

  double d_ties = 0.0;
  for (std::size_t i : data.i0) d_ties += w.b[i] * q(data.y1[i]);
  double d_first = 0.0, d_second = 0.0, d_own = 0.0;
  for (std::size_t i : data.i1) {
    d_first += w.b[i] * q(data.y1[i]);
    d_second += w.b[i] * q(data.y2[i]);
    d_own += w.b[i] * q(data.y1[i]);
  }
  for (std::size_t i : data.i2) {
    d_first += w.b[i] * q(data.y1[i]);
    d_second += w.b[i] * q(data.y2[i]);
    d_own += w.b[i] * q(data.y2[i]);
  }

  const double m0 = static_cast<double>(data.m0());
  const double m1 = static_cast<double>(data.m1());
  const double m2 = static_cast<double>(data.m2());
  const double den1 = d_ties + d_first;
  const double den2 = d_ties + d_second;
  const double den3 = d_ties + d_own;
  if (den1 == 0.0 || den2 == 0.0 || den3 == 0.0)
    throw std::domain_error("m_step_alphas: degenerate denominator");
  return {-(m1 * w.u1 + m2) / den1, -(m1 + m2 * w.v1) / den2,
          -(m0 + m1 * w.u2 + m2 * w.v2) / den3};
}

double m_step_theta(const PowerSeriesFamily& family, const EmWeights& w) {
  if (!family.has_theta_parameter()) return 1.0;
  double total = 0.0;
  for (double b : w.b) total += b;
  return family.solve_theta(total / static_cast<double>(w.b.size()));
}

double m_step_lambda_residual(const EmWeights& w, const BivariateSample& data, double lambda) {
  const auto alphas = m_step_alphas(w, data, lambda);
  const double a1 = alphas[0], a2 = alphas[1], a3 = alphas[2];
  auto tail = [&](double y) { return y / std::expm1(lambda * y); };

  double g = 0.0;
  for (std::size_t i : data.i0) {
    const double y = data.y1[i];
    g += y - (w.b[i] * (a1 + a2 + a3) - 1.0) * tail(y);
  }
  for (std::size_t i : data.i1) {
    g += data.y1[i] + data.y2[i];
    g -= (w.b[i] * (a1 + a3) - 1.0) * tail(data.y1[i]);
    g -= (w.b[i] * a2 - 1.0) * tail(data.y2[i]);
  }
  for (std::size_t i : data.i2) {
    g += data.y1[i] + data.y2[i];
    g -= (w.b[i] * a1 - 1.0) * tail(data.y1[i]);
    g -= (w.b[i] * (a2 + a3) - 1.0) * tail(data.y2[i]);
  }

  const double target = static_cast<double>(data.m0() + 2 * data.m1() + 2 * data.m2());
  return lambda * g - target;
}

double m_step_lambda(const EmWeights& w, const BivariateSample& data, double lambda_prev) {
  if (!(lambda_prev > 0.0)) throw std::domain_error("m_step_lambda: lambda_prev must be positive");
  auto residual = [&](double lam) { return m_step_lambda_residual(w, data, lam); };
  const Bracket br = expand_bracket(residual, lambda_prev, 20);
  if (br.lo == br.hi) return br.lo;
  return brent_zero(residual, br.lo, br.hi, br.f_lo, br.f_hi, 1e-10);
}

BgepsParams auto_init(const BivariateSample& data, const PowerSeriesFamily& family) {
  if (data.size() < 2) throw std::invalid_argument("auto_init: need at least two observations");
  double mean_max = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    mean_max += std::max(data.y1[i], data.y2[i]);
  mean_max /= static_cast<double>(data.size());
  double var_max = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double d = std::max(data.y1[i], data.y2[i]) - mean_max;
    var_max += d * d;
  }
  var_max /= static_cast<double>(data.size() - 1);

  // GE moment relations for U = max(Y1, Y2):
  //   E(U)   = (psi(a+1) - psi(1)) / lambda
  //   Var(U) = (psi'(1) - psi'(a+1)) / lambda^2
  // The coefficient of variation pins the shape, then the mean pins the rate.
  const double psi1 = digamma(1.0);
  const double tri1 = trigamma(1.0);
  auto cv2 = [&](double a) {
    const double num = tri1 - trigamma(a + 1.0);
    const double den = digamma(a + 1.0) - psi1;
    return num / (den * den);
  };
  const double ratio = var_max / (mean_max * mean_max);
  double shape = 1.0;
  const double lo = 1e-3, hi = 1e3;
  if (ratio >= cv2(lo))
    shape = lo;
  else if (ratio <= cv2(hi))
    shape = hi;
  else
    shape = brent_zero([&](double a) { return cv2(a) - ratio; }, lo, hi, cv2(lo) - ratio,
                       cv2(hi) - ratio, 1e-10);

  const double lambda0 = (digamma(shape + 1.0) - psi1) / mean_max;
  const double theta0 = std::isfinite(family.theta_sup()) ? 0.5 : 1.0;
  const double latent_mean = family.mean(theta0);
  const double a0 = shape / (3.0 * latent_mean);
  return {a0, a0, a0, lambda0, theta0, family};
}

namespace {

void standard_errors(FitReport& report, const BivariateSample& data) {
  const ParamVector pv{&data, report.estimates.family,
                       report.estimates.family.has_theta_parameter()};
  std::vector<double> x{report.estimates.alpha1, report.estimates.alpha2,
                        report.estimates.alpha3, report.estimates.lambda};
  if (pv.with_theta) x.push_back(report.estimates.theta);
  const std::size_t n = x.size();
  const std::vector<double> h = finite_steps(pv, x);

  auto at = [&](std::vector<double> xs) { return pv.loglik(xs); };
  const double f0 = at(x);

  // Observed information: central-difference Hessian of the log-likelihood.
  std::vector<std::vector<double>> hess(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> xp = x, xm = x;
    xp[i] += h[i];
    xm[i] -= h[i];
    hess[i][i] = (at(xp) - 2.0 * f0 + at(xm)) / (h[i] * h[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<double> xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[i] += h[i];
      xpp[j] += h[j];
      xpm[i] += h[i];
      xpm[j] -= h[j];
      xmp[i] -= h[i];
      xmp[j] += h[j];
      xmm[i] -= h[i];
      xmm[j] -= h[j];
      const double v = (at(xpp) - at(xpm) - at(xmp) + at(xmm)) / (4.0 * h[i] * h[j]);
      hess[i][j] = v;
      hess[j][i] = v;
    }
  }

  // Scaled score at the estimate, for the stationarity diagnostic.
  double max_grad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> xp = x, xm = x;
    xp[i] += h[i];
    xm[i] -= h[i];
    const double g = (at(xp) - at(xm)) / (2.0 * h[i]);
    const double scaled = std::fabs(g) * std::max(std::fabs(x[i]), 1.0) /
                          std::max(std::fabs(f0), 1.0);
    max_grad = std::max(max_grad, scaled);
  }
  report.max_scaled_gradient = max_grad;

  std::vector<std::vector<double>> info(n, std::vector<double>(n));
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      info[i][j] = -hess[i][j];
      finite = finite && std::isfinite(info[i][j]);
    }
  if (finite && invert_in_place(info)) {
    std::vector<double> se(n);
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (info[i][i] > 0.0)
        se[i] = std::sqrt(info[i][i]);
      else
        ok = false;
    }
    if (ok) {
      report.standard_errors = std::move(se);
      report.se_ok = true;
    }
  }
}

}  // namespace

FitReport fit(const BivariateSample& data, const PowerSeriesFamily& family,
              const FitOptions& options) {
  const std::size_t min_obs = family.has_theta_parameter() ? 5 : 4;
  if (data.size() < min_obs)
    throw std::invalid_argument("fit: need at least as many observations as parameters");

  BgepsParams current = options.init ? *options.init : auto_init(data, family);
  if (!(current.family == family))
    throw std::invalid_argument("fit: init parameters use a different family");
  validate(current);

  FitReport report{.estimates = current};
  report.metadata["initialization"] = options.init ? "user" : "auto";

  double loglik = log_likelihood(current, data);
  report.trajectory.push_back({param_array(current), loglik});

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const EmWeights w = e_step(current, data);

    double lambda_next;
    try {
      lambda_next = m_step_lambda(w, data, current.lambda);
    } catch (const BracketingError& e) {
      report.metadata["stopped_on"] = std::string("lambda solve: ") + e.what();
      break;
    }

    std::array<double, 3> alphas;
    try {
      alphas = m_step_alphas(w, data, lambda_next);
    } catch (const std::domain_error& e) {
      report.metadata["stopped_on"] = std::string("alpha update: ") + e.what();
      break;
    }
    if (!(alphas[0] > 0.0) || !(alphas[1] > 0.0) || !(alphas[2] > 0.0)) {
      report.metadata["stopped_on"] = "alpha update collapsed to zero (empty region)";
      break;
    }

    double theta_next = current.theta;
    if (family.has_theta_parameter()) {
      try {
        theta_next = family.clamp_theta(m_step_theta(family, w));
      } catch (const InfeasibleTargetError&) {
        ++report.theta_infeasible_events;
      }
    }

    const BgepsParams next{alphas[0], alphas[1], alphas[2], lambda_next, theta_next, family};
    const double loglik_next = log_likelihood(next, data);
    if (loglik_next < loglik - 1e-6) ++report.loglik_decreases;

    double rel = 0.0;
    const auto prev_arr = param_array(current);
    const auto next_arr = param_array(next);
    const std::size_t n_track = family.has_theta_parameter() ? 5 : 4;
    for (std::size_t j = 0; j < n_track; ++j)
      rel = std::max(rel, std::fabs(next_arr[j] - prev_arr[j]) /
                              std::max(std::fabs(prev_arr[j]), 1e-8));

    report.trajectory.push_back({next_arr, loglik_next});
    const bool done = rel < options.tol && std::fabs(loglik_next - loglik) < options.tol;
    current = next;
    loglik = loglik_next;
    report.iterations = iter;
    if (done) {
      report.converged = true;
      break;
    }
  }

  report.estimates = current;
  report.loglik = loglik;
  report.theta_boundary =
      family.has_theta_parameter() && family.near_boundary(current.theta);
  standard_errors(report, data);
  return report;
}

}  // namespace bgeps
