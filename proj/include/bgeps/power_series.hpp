#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bgeps/rng.hpp"

namespace bgeps {

enum class FamilyKind {
  Geometric,
  Poisson,
  Logarithmic,
  Binomial,
  NegativeBinomial,
  CustomPolynomial,
  Degenerate,
};

struct InfeasibleTargetError : std::domain_error {
  using std::domain_error::domain_error;
};

// Truncated-at-zero power series law on {1, 2, ...} with pmf
// a_n theta^n / C(theta), C(theta) = sum_n a_n theta^n.
//
// Tabulated families use their closed-form C, C', C'', C'''; the custom
// polynomial family works directly on its coefficient list. The log_* kernels
// take log(t) so that arguments far below the smallest normal double (large
// replica counts at tiny t) keep exact logarithms.
class PowerSeriesFamily {
 public:
  static PowerSeriesFamily geometric();
  static PowerSeriesFamily poisson();
  static PowerSeriesFamily logarithmic();
  static PowerSeriesFamily binomial(int k);
  static PowerSeriesFamily negative_binomial(int k);
  static PowerSeriesFamily custom_polynomial(std::vector<double> coeffs);
  static PowerSeriesFamily degenerate();

  FamilyKind kind() const { return kind_; }
  int replicas() const { return k_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  // Upper end s of the theta domain (0, s); +inf when unbounded.
  double theta_sup() const;
  // c = min{n : a_n > 0}.
  long min_support() const;
  // Largest support point, or max long when the support is unbounded.
  long max_support() const;
  bool has_theta_parameter() const { return kind_ != FamilyKind::Degenerate; }

  double c_value(double theta) const;
  // (C', C'', C''') at theta.
  std::array<double, 3> c_derivs(double theta) const;
  double pmf(double theta, long n) const;
  double log_pmf(double theta, long n) const;
  // E(N) = theta C'(theta) / C(theta); strictly increasing in theta.
  double mean(double theta) const;
  // Unique theta with mean(theta) == target_mean. Throws
  // InfeasibleTargetError when the target is outside the attainable range.
  double solve_theta(double target_mean) const;
  // Sequential inversion of the cumulative pmf.
  long sample_n(double theta, SplitMix64& rng) const;

  // log a_n; -inf off the support.
  double log_coeff(long n) const;

  // Log-scale kernels at t = exp(log_t), 0 < t < s:
  double log_c_from_log(double log_t) const;   // log C(t)
  double log_sum_n1(double log_t) const;       // log sum n   a_n t^{n-1} = log C'(t)
  double log_sum_n2(double log_t) const;       // log sum n^2 a_n t^{n-1} = log(t C'' + C')
  double log_sum_n3(double log_t) const;       // log sum n^3 a_n t^{n-1}

  void validate_theta(double theta) const;
  // Pulls evaluations off the boundary s (s - 1e-12 at most).
  double clamp_theta(double theta) const;
  bool near_boundary(double theta) const;

  // Grammar: geometric | poisson | logarithmic | binomial:k | negbinomial:k
  //          | poly:a1,a2,... | degenerate
  std::string spec_string() const;
  static PowerSeriesFamily parse_spec(const std::string& spec);

  bool operator==(const PowerSeriesFamily&) const = default;

 private:
  PowerSeriesFamily(FamilyKind kind, int k, std::vector<double> coeffs);

  double log_c1_from_log(double log_t) const;
  double log_c2_from_log(double log_t) const;
  double log_c3_from_log(double log_t) const;

  FamilyKind kind_;
  int k_ = 0;
  std::vector<double> coeffs_;
};

}  // namespace bgeps
