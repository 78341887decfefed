#include "bgeps/bgeps.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bgeps/math_util.hpp"
#include "bgeps/parallel.hpp"

namespace bgeps {

namespace {

// Per-parameter quantities shared by every observation.
struct EvalContext {
  double a1, a2, a3, lambda;
  double log_theta;
  double log_c_theta;
  const PowerSeriesFamily* family;

  explicit EvalContext(const BgepsParams& p)
      : a1(p.alpha1), a2(p.alpha2), a3(p.alpha3), lambda(p.lambda), family(&p.family) {
    const double th = p.family.clamp_theta(p.theta);
    log_theta = std::log(th);
    log_c_theta = p.family.log_c_from_log(log_theta);
  }

  double log_f1(double y1, double y2) const {
    const double l1 = log1mexp(lambda * y1);
    const double l2 = log1mexp(lambda * y2);
    const double log_k1 = (a1 + a3) * l1 + a2 * l2;
    return log_theta - log_c_theta + std::log(a1 + a3) + std::log(a2) +
           2.0 * std::log(lambda) - lambda * (y1 + y2) + (a1 + a3 - 1.0) * l1 +
           (a2 - 1.0) * l2 + family->log_sum_n2(log_theta + log_k1);
  }

  double log_f2(double y1, double y2) const {
    const double l1 = log1mexp(lambda * y1);
    const double l2 = log1mexp(lambda * y2);
    const double log_k2 = a1 * l1 + (a2 + a3) * l2;
    return log_theta - log_c_theta + std::log(a1) + std::log(a2 + a3) +
           2.0 * std::log(lambda) - lambda * (y1 + y2) + (a1 - 1.0) * l1 +
           (a2 + a3 - 1.0) * l2 + family->log_sum_n2(log_theta + log_k2);
  }

  double log_f0(double y) const {
    const double l = log1mexp(lambda * y);
    const double log_k0 = (a1 + a2 + a3) * l;
    return log_theta - log_c_theta + std::log(a3) + std::log(lambda) - lambda * y +
           (a1 + a2 + a3 - 1.0) * l + family->log_sum_n1(log_theta + log_k0);
  }

  double log_density(double y1, double y2) const {
    if (y1 < y2) return log_f1(y1, y2);
    if (y2 < y1) return log_f2(y1, y2);
    return log_f0(y1);
  }
};

void require_positive_point(double y1, double y2) {
  if (!(y1 > 0.0) || !(y2 > 0.0))
    throw std::domain_error("density evaluation needs positive coordinates");
}

}  // namespace

void validate(const BgepsParams& p) {
  if (!(p.alpha1 > 0.0) || !(p.alpha2 > 0.0) || !(p.alpha3 > 0.0) ||
      !std::isfinite(p.alpha1) || !std::isfinite(p.alpha2) || !std::isfinite(p.alpha3))
    throw std::domain_error("shape parameters must be positive and finite");
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
    throw std::domain_error("rate lambda must be positive and finite");
  p.family.validate_theta(p.theta);
}

double joint_cdf(const BgepsParams& p, double y1, double y2) {
  validate(p);
  if (!(y1 > 0.0) || !(y2 > 0.0)) return 0.0;
  const double th = p.family.clamp_theta(p.theta);
  const double l1 = log1mexp(p.lambda * y1);
  const double l2 = log1mexp(p.lambda * y2);
  const double log_k = y1 <= y2 ? (p.alpha1 + p.alpha3) * l1 + p.alpha2 * l2
                                : p.alpha1 * l1 + (p.alpha2 + p.alpha3) * l2;
  if (p.family.kind() == FamilyKind::Degenerate) return std::exp(log_k);
  const double log_theta = std::log(th);
  const double r = std::exp(p.family.log_c_from_log(log_theta + log_k) -
                            p.family.log_c_from_log(log_theta));
  return std::min(r, 1.0);
}

DensityValue joint_pdf(const BgepsParams& p, double y1, double y2) {
  validate(p);
  require_positive_point(y1, y2);
  const EvalContext ctx(p);
  Branch branch;
  double lf;
  if (y1 < y2) {
    branch = Branch::F1;
    lf = ctx.log_f1(y1, y2);
  } else if (y2 < y1) {
    branch = Branch::F2;
    lf = ctx.log_f2(y1, y2);
  } else {
    branch = Branch::F0;
    lf = ctx.log_f0(y1);
  }
  return {branch, lf == kNegInf ? 0.0 : std::exp(lf), lf};
}

std::pair<double, double> decomposition_weights(const BgepsParams& p) {
  validate(p);
  const double total = p.alpha_sum();
  return {(p.alpha1 + p.alpha2) / total, p.alpha3 / total};
}

double marginal_cdf(const BgepsParams& p, int which, double y) {
  validate(p);
  if (which != 1 && which != 2) throw std::invalid_argument("marginal_cdf: which must be 1 or 2");
  const double shape = (which == 1 ? p.alpha1 : p.alpha2) + p.alpha3;
  return geps_cdf({shape, p.lambda}, p.family, p.theta, y);
}

double max_cdf(const BgepsParams& p, double y) {
  validate(p);
  return geps_cdf({p.alpha_sum(), p.lambda}, p.family, p.theta, y);
}

double conditional_cdf(const BgepsParams& p, double y1, double y2) {
  validate(p);
  if (!(y2 > 0.0)) throw std::domain_error("conditional_cdf: y2 must be positive");
  if (!(y1 > 0.0)) return 0.0;
  const double th = p.family.clamp_theta(p.theta);
  const double log_theta = std::log(th);
  const double l1 = log1mexp(p.lambda * y1);
  const double l2 = log1mexp(p.lambda * y2);
  const double log_k = y1 <= y2 ? (p.alpha1 + p.alpha3) * l1 + p.alpha2 * l2
                                : p.alpha1 * l1 + (p.alpha2 + p.alpha3) * l2;
  const double log_den = p.family.log_c_from_log(log_theta + (p.alpha2 + p.alpha3) * l2);
  if (log_den == kNegInf)
    throw std::domain_error("conditional_cdf: conditioning probability underflows to zero");
  const double r = std::exp(p.family.log_c_from_log(log_theta + log_k) - log_den);
  return std::min(r, 1.0);
}

double prob_y1_less_y2(const BgepsParams& p) {
  validate(p);
  // Y1 < Y2 exactly when the second latent maximum dominates, which has
  // probability alpha2 over the shape total for every N, hence for every
  // family and theta.
  return p.alpha2 / p.alpha_sum();
}

double cond_n_pmf(const BgepsParams& p, double y1, double y2, long n) {
  validate(p);
  require_positive_point(y1, y2);
  if (n < 1) return 0.0;
  const double la = p.family.log_coeff(n);
  if (la == kNegInf) return 0.0;
  const double th = p.family.clamp_theta(p.theta);
  const double log_theta = std::log(th);
  const double l1 = log1mexp(p.lambda * y1);
  const double l2 = log1mexp(p.lambda * y2);
  const double nd = static_cast<double>(n);
  double log_p;
  if (y1 == y2) {
    const double log_t = log_theta + p.alpha_sum() * l1;
    log_p = std::log(nd) + la + (nd - 1.0) * log_t - p.family.log_sum_n1(log_t);
  } else {
    const double log_k = y1 < y2 ? (p.alpha1 + p.alpha3) * l1 + p.alpha2 * l2
                                 : p.alpha1 * l1 + (p.alpha2 + p.alpha3) * l2;
    const double log_t = log_theta + log_k;
    log_p = 2.0 * std::log(nd) + la + (nd - 1.0) * log_t - p.family.log_sum_n2(log_t);
  }
  return std::exp(log_p);
}

double cond_n_mean(const BgepsParams& p, double y1, double y2) {
  validate(p);
  require_positive_point(y1, y2);
  const double th = p.family.clamp_theta(p.theta);
  const double log_theta = std::log(th);
  const double l1 = log1mexp(p.lambda * y1);
  const double l2 = log1mexp(p.lambda * y2);
  if (y1 == y2) {
    const double log_t = log_theta + p.alpha_sum() * l1;
    return std::exp(p.family.log_sum_n2(log_t) - p.family.log_sum_n1(log_t));
  }
  const double log_k = y1 < y2 ? (p.alpha1 + p.alpha3) * l1 + p.alpha2 * l2
                               : p.alpha1 * l1 + (p.alpha2 + p.alpha3) * l2;
  const double log_t = log_theta + log_k;
  return std::exp(p.family.log_sum_n3(log_t) - p.family.log_sum_n2(log_t));
}

double log_likelihood(const BgepsParams& p, const BivariateSample& data) {
  validate(p);
  const EvalContext ctx(p);
  std::vector<double> terms(data.size());
  parallel_for_index(static_cast<std::ptrdiff_t>(data.size()), [&](std::size_t i) {
    terms[i] = ctx.log_density(data.y1[i], data.y2[i]);
  });
  return ordered_sum(terms);
}

double log_likelihood_serial(const BgepsParams& p, const BivariateSample& data) {
  validate(p);
  const EvalContext ctx(p);
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    acc += ctx.log_density(data.y1[i], data.y2[i]);
  return acc;
}

BgepsParams limiting_bge(const BgepsParams& p) {
  validate(p);
  const double c = static_cast<double>(p.family.min_support());
  return {c * p.alpha1, c * p.alpha2, c * p.alpha3, p.lambda, 1.0,
          PowerSeriesFamily::degenerate()};
}

}  // namespace bgeps
