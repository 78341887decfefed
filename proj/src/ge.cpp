#include "bgeps/ge.hpp"

#include <cmath>
#include <stdexcept>

#include "bgeps/math_util.hpp"

namespace bgeps {

void validate(const GeParams& p) {
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
    throw std::domain_error("GE shape alpha must be positive and finite");
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
    throw std::domain_error("GE rate lambda must be positive and finite");
}

double ge_log_cdf(const GeParams& p, double x) {
  validate(p);
  if (!(x > 0.0)) return kNegInf;
  return p.alpha * log1mexp(p.lambda * x);
}

double ge_cdf(const GeParams& p, double x) {
  const double lf = ge_log_cdf(p, x);
  return lf == kNegInf ? 0.0 : std::exp(lf);
}

double ge_log_pdf(const GeParams& p, double x) {
  validate(p);
  if (x < 0.0) return kNegInf;
  if (x == 0.0) return p.alpha < 1.0 ? kPosInf : kNegInf;
  return std::log(p.alpha) + std::log(p.lambda) - p.lambda * x +
         (p.alpha - 1.0) * log1mexp(p.lambda * x);
}

double ge_pdf(const GeParams& p, double x) {
  const double lf = ge_log_pdf(p, x);
  if (lf == kNegInf) return 0.0;
  if (lf == kPosInf) return kPosInf;
  return std::exp(lf);
}

double ge_quantile(const GeParams& p, double u) {
  validate(p);
  if (!(u > 0.0) || !(u < 1.0))
    throw std::domain_error("ge_quantile: u must lie in (0, 1)");
  // x = -log(1 - u^{1/alpha}) / lambda
  return -std::log(-std::expm1(std::log(u) / p.alpha)) / p.lambda;
}

double geps_cdf(const GeParams& p, const PowerSeriesFamily& family, double theta, double x) {
  validate(p);
  family.validate_theta(theta);
  if (family.kind() == FamilyKind::Degenerate) return ge_cdf(p, x);
  if (!(x > 0.0)) return 0.0;
  const double th = family.clamp_theta(theta);
  const double log_theta = std::log(th);
  const double r = std::exp(family.log_c_from_log(log_theta + ge_log_cdf(p, x)) -
                            family.log_c_from_log(log_theta));
  return std::min(r, 1.0);
}

}  // namespace bgeps
