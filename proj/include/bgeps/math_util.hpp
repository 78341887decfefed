#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace bgeps {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// log(1 - e^{-t}) for t > 0, split at ln 2 to avoid cancellation at both ends.
inline double log1mexp(double t) {
  if (t <= 0.0) return kNegInf;
  return t > std::numbers::ln2 ? std::log1p(-std::exp(-t))
                               : std::log(-std::expm1(-t));
}

// log(e^a + e^b)
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

inline double log_add(double a, double b, double c) {
  return log_add(log_add(a, b), c);
}

// log(e^t - 1) for t > 0, stable at both ends.
inline double log_expm1(double t) {
  if (t <= 0.0) return kNegInf;
  if (t > 700.0) return t + std::log1p(-std::exp(-t));
  if (t < 1e-8) return std::log(t) + std::log1p(0.5 * t);
  return std::log(std::expm1(t));
}

// Digamma via recurrence into the asymptotic regime.
inline double digamma(double x) {
  double r = 0.0;
  while (x < 6.0) {
    r -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return r + std::log(x) - 0.5 * inv -
         inv2 * (1.0 / 12.0 -
                 inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
}

inline double trigamma(double x) {
  double r = 0.0;
  while (x < 6.0) {
    r += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return r +
         inv * (1.0 +
                inv * (0.5 + inv * (1.0 / 6.0 -
                                    inv2 * (1.0 / 30.0 -
                                            inv2 * (1.0 / 42.0 - inv2 / 30.0)))));
}

}  // namespace bgeps
