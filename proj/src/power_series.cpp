#include "bgeps/power_series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bgeps/math_util.hpp"
#include "bgeps/roots.hpp"

namespace bgeps {

namespace {

constexpr double kBoundaryGap = 1e-12;
constexpr long kInversionCap = 10'000'000;

double require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::overflow_error(std::string(what) + " overflows");
  return v;
}

}  // namespace

PowerSeriesFamily::PowerSeriesFamily(FamilyKind kind, int k, std::vector<double> coeffs)
    : kind_(kind), k_(k), coeffs_(std::move(coeffs)) {}

PowerSeriesFamily PowerSeriesFamily::geometric() {
  return PowerSeriesFamily(FamilyKind::Geometric, 0, {});
}
PowerSeriesFamily PowerSeriesFamily::poisson() {
  return PowerSeriesFamily(FamilyKind::Poisson, 0, {});
}
PowerSeriesFamily PowerSeriesFamily::logarithmic() {
  return PowerSeriesFamily(FamilyKind::Logarithmic, 0, {});
}
PowerSeriesFamily PowerSeriesFamily::binomial(int k) {
  if (k < 1) throw std::invalid_argument("binomial family needs k >= 1");
  return PowerSeriesFamily(FamilyKind::Binomial, k, {});
}
PowerSeriesFamily PowerSeriesFamily::negative_binomial(int k) {
  if (k < 1) throw std::invalid_argument("negative binomial family needs k >= 1");
  return PowerSeriesFamily(FamilyKind::NegativeBinomial, k, {});
}
PowerSeriesFamily PowerSeriesFamily::custom_polynomial(std::vector<double> coeffs) {
  bool any_positive = false;
  for (double a : coeffs) {
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("polynomial coefficients must be finite and >= 0");
    any_positive = any_positive || a > 0.0;
  }
  if (!any_positive)
    throw std::invalid_argument("polynomial family needs at least one positive coefficient");
  return PowerSeriesFamily(FamilyKind::CustomPolynomial, 0, std::move(coeffs));
}
PowerSeriesFamily PowerSeriesFamily::degenerate() {
  return PowerSeriesFamily(FamilyKind::Degenerate, 0, {});
}

double PowerSeriesFamily::theta_sup() const {
  switch (kind_) {
    case FamilyKind::Geometric:
    case FamilyKind::Logarithmic:
    case FamilyKind::NegativeBinomial:
      return 1.0;
    default:
      return kPosInf;
  }
}

long PowerSeriesFamily::min_support() const {
  switch (kind_) {
    case FamilyKind::NegativeBinomial:
      return k_;
    case FamilyKind::CustomPolynomial: {
      for (std::size_t i = 0; i < coeffs_.size(); ++i)
        if (coeffs_[i] > 0.0) return static_cast<long>(i) + 1;
      return 1;  // unreachable: construction requires a positive coefficient
    }
    default:
      return 1;
  }
}

long PowerSeriesFamily::max_support() const {
  switch (kind_) {
    case FamilyKind::Binomial:
      return k_;
    case FamilyKind::Degenerate:
      return 1;
    case FamilyKind::CustomPolynomial: {
      long d = 0;
      for (std::size_t i = 0; i < coeffs_.size(); ++i)
        if (coeffs_[i] > 0.0) d = static_cast<long>(i) + 1;
      return d;
    }
    default:
      return std::numeric_limits<long>::max();
  }
}

void PowerSeriesFamily::validate_theta(double theta) const {
  if (!(theta > 0.0) || theta >= theta_sup())
    throw std::domain_error("theta outside the open domain (0, s) for family " + spec_string());
}

double PowerSeriesFamily::clamp_theta(double theta) const {
  const double s = theta_sup();
  if (std::isfinite(s)) return std::min(theta, s - kBoundaryGap);
  return theta;
}

bool PowerSeriesFamily::near_boundary(double theta) const {
  const double s = theta_sup();
  return std::isfinite(s) && theta > s - 1e-9;
}

double PowerSeriesFamily::c_value(double theta) const {
  validate_theta(theta);
  const double t = clamp_theta(theta);
  double v;
  switch (kind_) {
    case FamilyKind::Geometric:
      v = t / (1.0 - t);
      break;
    case FamilyKind::Poisson:
      v = std::expm1(t);
      break;
    case FamilyKind::Logarithmic:
      v = -std::log1p(-t);
      break;
    case FamilyKind::Binomial:
      v = std::expm1(k_ * std::log1p(t));
      break;
    case FamilyKind::NegativeBinomial:
      v = std::exp(k_ * (std::log(t) - std::log1p(-t)));
      break;
    case FamilyKind::CustomPolynomial: {
      v = 0.0;
      for (std::size_t i = coeffs_.size(); i-- > 0;) v = v * t + coeffs_[i];
      v *= t;
      break;
    }
    case FamilyKind::Degenerate:
      v = t;
      break;
  }
  return require_finite(v, "C(theta)");
}

std::array<double, 3> PowerSeriesFamily::c_derivs(double theta) const {
  validate_theta(theta);
  const double t = clamp_theta(theta);
  std::array<double, 3> d{};
  switch (kind_) {
    case FamilyKind::Geometric: {
      const double q = 1.0 / (1.0 - t);
      d = {q * q, 2.0 * q * q * q, 6.0 * q * q * q * q};
      break;
    }
    case FamilyKind::Poisson: {
      const double e = std::exp(t);
      d = {e, e, e};
      break;
    }
    case FamilyKind::Logarithmic: {
      const double q = 1.0 / (1.0 - t);
      d = {q, q * q, 2.0 * q * q * q};
      break;
    }
    case FamilyKind::Binomial: {
      const double k = k_;
      d = {k * std::pow(1.0 + t, k - 1), k * (k - 1) * std::pow(1.0 + t, k - 2),
           k * (k - 1) * (k - 2) * std::pow(1.0 + t, k - 3)};
      break;
    }
    case FamilyKind::NegativeBinomial: {
      const double k = k_;
      const double q = 1.0 - t;
      d = {k * std::pow(t, k - 1) / std::pow(q, k + 1),
           k * (k + 2.0 * t - 1.0) * std::pow(t, k - 2) / std::pow(q, k + 2),
           k * (k * k + 6.0 * k * t + 6.0 * t * t - 3.0 * k - 6.0 * t + 2.0) *
               std::pow(t, k - 3) / std::pow(q, k + 3)};
      break;
    }
    case FamilyKind::CustomPolynomial: {
      double c1 = 0.0, c2 = 0.0, c3 = 0.0;
      for (std::size_t i = coeffs_.size(); i-- > 0;) {
        const double n = static_cast<double>(i) + 1.0;
        c1 = c1 * t + n * coeffs_[i];
        c2 = c2 * t + n * (n - 1.0) * coeffs_[i];
        c3 = c3 * t + n * (n - 1.0) * (n - 2.0) * coeffs_[i];
      }
      // c2 and c3 carry surplus powers of t; divide them back out.
      d = {c1, t > 0 ? c2 / t : 0.0, t > 0 ? c3 / (t * t) : 0.0};
      break;
    }
    case FamilyKind::Degenerate:
      d = {1.0, 0.0, 0.0};
      break;
  }
  require_finite(d[0], "C'(theta)");
  require_finite(d[1], "C''(theta)");
  require_finite(d[2], "C'''(theta)");
  return d;
}

double PowerSeriesFamily::log_coeff(long n) const {
  if (n < 1) return kNegInf;
  switch (kind_) {
    case FamilyKind::Geometric:
      return 0.0;
    case FamilyKind::Poisson:
      return -std::lgamma(static_cast<double>(n) + 1.0);
    case FamilyKind::Logarithmic:
      return -std::log(static_cast<double>(n));
    case FamilyKind::Binomial: {
      if (n > k_) return kNegInf;
      const double kd = k_, nd = n;
      return std::lgamma(kd + 1.0) - std::lgamma(nd + 1.0) - std::lgamma(kd - nd + 1.0);
    }
    case FamilyKind::NegativeBinomial: {
      if (n < k_) return kNegInf;
      const double kd = k_, nd = n;
      return std::lgamma(nd) - std::lgamma(kd) - std::lgamma(nd - kd + 1.0);
    }
    case FamilyKind::CustomPolynomial: {
      if (n > static_cast<long>(coeffs_.size())) return kNegInf;
      const double a = coeffs_[static_cast<std::size_t>(n - 1)];
      return a > 0.0 ? std::log(a) : kNegInf;
    }
    case FamilyKind::Degenerate:
      return n == 1 ? 0.0 : kNegInf;
  }
  return kNegInf;
}

double PowerSeriesFamily::log_c_from_log(double log_t) const {
  const double t = std::exp(log_t);
  switch (kind_) {
    case FamilyKind::Geometric:
      return log_t - std::log1p(-t);
    case FamilyKind::Poisson:
      if (t < 1e-8) return log_t + std::log1p(0.5 * t);
      return log_expm1(t);
    case FamilyKind::Logarithmic:
      if (t < 1e-8) return log_t + std::log1p(0.5 * t);
      return std::log(-std::log1p(-t));
    case FamilyKind::Binomial: {
      if (t < 1e-10) return std::log(static_cast<double>(k_)) + log_t + std::log1p(0.5 * (k_ - 1) * t);
      return log_expm1(k_ * std::log1p(t));
    }
    case FamilyKind::NegativeBinomial:
      return k_ * (log_t - std::log1p(-t));
    case FamilyKind::CustomPolynomial: {
      double acc = kNegInf;
      for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] <= 0.0) continue;
        const double n = static_cast<double>(i) + 1.0;
        acc = log_add(acc, std::log(coeffs_[i]) + n * log_t);
      }
      return acc;
    }
    case FamilyKind::Degenerate:
      return log_t;
  }
  return kNegInf;
}

double PowerSeriesFamily::log_c1_from_log(double log_t) const {
  const double t = std::exp(log_t);
  switch (kind_) {
    case FamilyKind::Geometric:
      return -2.0 * std::log1p(-t);
    case FamilyKind::Poisson:
      return t;
    case FamilyKind::Logarithmic:
      return -std::log1p(-t);
    case FamilyKind::Binomial:
      return std::log(static_cast<double>(k_)) + (k_ - 1) * std::log1p(t);
    case FamilyKind::NegativeBinomial:
      return std::log(static_cast<double>(k_)) + (k_ - 1) * log_t - (k_ + 1) * std::log1p(-t);
    case FamilyKind::CustomPolynomial: {
      double acc = kNegInf;
      for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] <= 0.0) continue;
        const double n = static_cast<double>(i) + 1.0;
        acc = log_add(acc, std::log(n * coeffs_[i]) + (n - 1.0) * log_t);
      }
      return acc;
    }
    case FamilyKind::Degenerate:
      return 0.0;
  }
  return kNegInf;
}

double PowerSeriesFamily::log_c2_from_log(double log_t) const {
  const double t = std::exp(log_t);
  switch (kind_) {
    case FamilyKind::Geometric:
      return std::log(2.0) - 3.0 * std::log1p(-t);
    case FamilyKind::Poisson:
      return t;
    case FamilyKind::Logarithmic:
      return -2.0 * std::log1p(-t);
    case FamilyKind::Binomial: {
      if (k_ < 2) return kNegInf;
      const double k = k_;
      return std::log(k * (k - 1.0)) + (k_ - 2) * std::log1p(t);
    }
    case FamilyKind::NegativeBinomial: {
      // C'' = k (k - 1 + 2t) t^{k-2} (1-t)^{-(k+2)}
      const double k = k_;
      const double head = k_ == 1 ? std::log(2.0) + log_t : std::log((k - 1.0) + 2.0 * t);
      return std::log(k) + head + (k_ - 2) * log_t - (k_ + 2) * std::log1p(-t);
    }
    case FamilyKind::CustomPolynomial: {
      double acc = kNegInf;
      for (std::size_t i = 1; i < coeffs_.size(); ++i) {
        if (coeffs_[i] <= 0.0) continue;
        const double n = static_cast<double>(i) + 1.0;
        acc = log_add(acc, std::log(n * (n - 1.0) * coeffs_[i]) + (n - 2.0) * log_t);
      }
      return acc;
    }
    case FamilyKind::Degenerate:
      return kNegInf;
  }
  return kNegInf;
}

double PowerSeriesFamily::log_c3_from_log(double log_t) const {
  const double t = std::exp(log_t);
  switch (kind_) {
    case FamilyKind::Geometric:
      return std::log(6.0) - 4.0 * std::log1p(-t);
    case FamilyKind::Poisson:
      return t;
    case FamilyKind::Logarithmic:
      return std::log(2.0) - 3.0 * std::log1p(-t);
    case FamilyKind::Binomial: {
      if (k_ < 3) return kNegInf;
      const double k = k_;
      return std::log(k * (k - 1.0) * (k - 2.0)) + (k_ - 3) * std::log1p(t);
    }
    case FamilyKind::NegativeBinomial: {
      // C''' = k ((k-1)(k-2) + 6t(k-1) + 6t^2) t^{k-3} (1-t)^{-(k+3)}
      const double k = k_;
      double head;
      if (k_ == 1)
        head = std::log(6.0) + 2.0 * log_t;
      else if (k_ == 2)
        head = std::log(6.0) + log_t + std::log1p(t);
      else
        head = std::log((k - 1.0) * (k - 2.0) + 6.0 * t * (k - 1.0) + 6.0 * t * t);
      return std::log(k) + head + (k_ - 3) * log_t - (k_ + 3) * std::log1p(-t);
    }
    case FamilyKind::CustomPolynomial: {
      double acc = kNegInf;
      for (std::size_t i = 2; i < coeffs_.size(); ++i) {
        if (coeffs_[i] <= 0.0) continue;
        const double n = static_cast<double>(i) + 1.0;
        acc = log_add(acc, std::log(n * (n - 1.0) * (n - 2.0) * coeffs_[i]) + (n - 3.0) * log_t);
      }
      return acc;
    }
    case FamilyKind::Degenerate:
      return kNegInf;
  }
  return kNegInf;
}

double PowerSeriesFamily::log_sum_n1(double log_t) const { return log_c1_from_log(log_t); }

double PowerSeriesFamily::log_sum_n2(double log_t) const {
  return log_add(log_t + log_c2_from_log(log_t), log_c1_from_log(log_t));
}

double PowerSeriesFamily::log_sum_n3(double log_t) const {
  return log_add(2.0 * log_t + log_c3_from_log(log_t),
                 std::log(3.0) + log_t + log_c2_from_log(log_t),
                 log_c1_from_log(log_t));
}

double PowerSeriesFamily::log_pmf(double theta, long n) const {
  validate_theta(theta);
  const double t = clamp_theta(theta);
  const double la = log_coeff(n);
  if (la == kNegInf) return kNegInf;
  const double log_t = std::log(t);
  return la + static_cast<double>(n) * log_t - log_c_from_log(log_t);
}

double PowerSeriesFamily::pmf(double theta, long n) const {
  const double lp = log_pmf(theta, n);
  return lp == kNegInf ? 0.0 : std::exp(lp);
}

double PowerSeriesFamily::mean(double theta) const {
  validate_theta(theta);
  if (kind_ == FamilyKind::Degenerate) return 1.0;
  const double t = clamp_theta(theta);
  const double log_t = std::log(t);
  return std::exp(log_t + log_c1_from_log(log_t) - log_c_from_log(log_t));
}

double PowerSeriesFamily::solve_theta(double target_mean) const {
  if (!std::isfinite(target_mean))
    throw InfeasibleTargetError("solve_theta: target mean must be finite");
  if (kind_ == FamilyKind::Degenerate) {
    // C(theta) = theta gives E(N) = 1 for every theta; nothing to solve.
    if (std::fabs(target_mean - 1.0) > 1e-9)
      throw InfeasibleTargetError("solve_theta: degenerate family has mean 1");
    return 1.0;
  }
  const double c = static_cast<double>(min_support());
  if (target_mean <= c)
    throw InfeasibleTargetError("solve_theta: target mean at or below the support minimum");

  const double s = theta_sup();
  double hi;
  if (std::isfinite(s)) {
    hi = s - kBoundaryGap;
    if (mean(hi) <= target_mean)
      throw InfeasibleTargetError("solve_theta: target mean unattainable below the theta boundary");
  } else {
    hi = 1.0;
    while (mean(hi) <= target_mean) {
      hi *= 2.0;
      if (hi > 1e15)
        throw InfeasibleTargetError("solve_theta: target mean above the family's supremum");
    }
  }
  double lo = std::min(0.5, hi * 0.5);
  while (mean(lo) >= target_mean) {
    lo *= 0.5;
    if (lo < 1e-300)
      throw InfeasibleTargetError("solve_theta: target mean unattainable near theta = 0");
  }

  auto residual = [&](double th) { return mean(th) - target_mean; };
  const double root = brent_zero(residual, lo, hi, residual(lo), residual(hi), 1e-15);
  if (std::fabs(mean(root) - target_mean) > 1e-10 * target_mean)
    throw std::runtime_error("solve_theta: root refinement failed tolerance");
  return root;
}

long PowerSeriesFamily::sample_n(double theta, SplitMix64& rng) const {
  validate_theta(theta);
  if (kind_ == FamilyKind::Degenerate) return 1;
  const double t = clamp_theta(theta);
  const double u = rng.next_open01();

  if (kind_ == FamilyKind::CustomPolynomial) {
    double total = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      total += coeffs_[i] * std::pow(t, static_cast<double>(i) + 1.0);
    double cum = 0.0;
    long last = min_support();
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i] <= 0.0) continue;
      last = static_cast<long>(i) + 1;
      cum += coeffs_[i] * std::pow(t, static_cast<double>(i) + 1.0) / total;
      if (u <= cum) return last;
    }
    return last;  // rounding residue lands on the top support point
  }

  long n = min_support();
  double p = std::exp(log_pmf(theta, n));
  double cum = p;
  const long top = max_support();
  while (u > cum) {
    if (n >= top) return top;
    if (n >= kInversionCap)
      throw std::runtime_error("sample_n: inversion walked past 1e7 support points (theta too close to s)");
    // step the pmf by the coefficient ratio a_{n+1}/a_n * theta
    double ratio;
    switch (kind_) {
      case FamilyKind::Geometric:
        ratio = t;
        break;
      case FamilyKind::Poisson:
        ratio = t / static_cast<double>(n + 1);
        break;
      case FamilyKind::Logarithmic:
        ratio = t * static_cast<double>(n) / static_cast<double>(n + 1);
        break;
      case FamilyKind::Binomial:
        ratio = t * static_cast<double>(k_ - n) / static_cast<double>(n + 1);
        break;
      case FamilyKind::NegativeBinomial:
        ratio = t * static_cast<double>(n) / static_cast<double>(n + 1 - k_);
        break;
      default:
        ratio = 0.0;
    }
    p *= ratio;
    cum += p;
    ++n;
  }
  return n;
}

std::string PowerSeriesFamily::spec_string() const {
  switch (kind_) {
    case FamilyKind::Geometric:
      return "geometric";
    case FamilyKind::Poisson:
      return "poisson";
    case FamilyKind::Logarithmic:
      return "logarithmic";
    case FamilyKind::Binomial:
      return "binomial:" + std::to_string(k_);
    case FamilyKind::NegativeBinomial:
      return "negbinomial:" + std::to_string(k_);
    case FamilyKind::CustomPolynomial: {
      std::ostringstream out;
      out << "poly:";
      for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (i > 0) out << ',';
        out << coeffs_[i];
      }
      return out.str();
    }
    case FamilyKind::Degenerate:
      return "degenerate";
  }
  return "";
}

PowerSeriesFamily PowerSeriesFamily::parse_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);

  auto parse_k = [&]() {
    std::size_t pos = 0;
    int k = 0;
    try {
      k = std::stoi(arg, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("family spec '" + spec + "': expected an integer k");
    }
    if (pos != arg.size() || k < 1)
      throw std::invalid_argument("family spec '" + spec + "': k must be a positive integer");
    return k;
  };

  if (name == "geometric") return geometric();
  if (name == "poisson") return poisson();
  if (name == "logarithmic") return logarithmic();
  if (name == "degenerate") return degenerate();
  if (name == "binomial") {
    if (arg.empty()) throw std::invalid_argument("family spec 'binomial' needs ':k'");
    return binomial(parse_k());
  }
  if (name == "negbinomial") {
    if (arg.empty()) throw std::invalid_argument("family spec 'negbinomial' needs ':k'");
    return negative_binomial(parse_k());
  }
  if (name == "poly") {
    if (arg.empty()) throw std::invalid_argument("family spec 'poly' needs ':a1,a2,...'");
    std::vector<double> coeffs;
    std::istringstream in(arg);
    std::string field;
    while (std::getline(in, field, ',')) {
      std::size_t pos = 0;
      double a = 0.0;
      try {
        a = std::stod(field, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("family spec '" + spec + "': bad coefficient '" + field + "'");
      }
      if (pos != field.size())
        throw std::invalid_argument("family spec '" + spec + "': bad coefficient '" + field + "'");
      coeffs.push_back(a);
    }
    return custom_polynomial(std::move(coeffs));
  }
  throw std::invalid_argument("unknown family spec '" + spec + "'");
}

}  // namespace bgeps
