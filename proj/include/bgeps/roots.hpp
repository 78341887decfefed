#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace bgeps {

struct BracketingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Brent's zeroin on [a, b]; fa and fb must have opposite signs.
// rel_tol is the x-tolerance relative to |b|; machine epsilon is the floor.
template <class F>
double brent_zero(F&& f, double a, double b, double fa, double fb,
                  double rel_tol = 1e-14) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (std::signbit(fa) == std::signbit(fb))
    throw BracketingError("brent_zero: endpoints do not bracket a root");

  const double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if (std::signbit(fb) == std::signbit(fc)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double xm = 0.5 * (c - b);
    const double tol1 = 2.0 * eps * std::fabs(b) + 0.5 * rel_tol * std::fabs(b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) < tol1 || std::fabs(fa) <= std::fabs(fb)) {
      d = xm;
      e = d;
    } else {
      double p, q;
      const double s = fb / fa;
      if (a != c) {
        q = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      } else {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      }
      if (p > 0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < 3.0 * xm * q - std::fabs(tol1 * q) &&
          p < std::fabs(0.5 * e * q)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = f(b);
  }
  return b;
}

struct Bracket {
  double lo, hi;
  double f_lo, f_hi;
};

// Expands [x0/2, 2*x0], [x0/4, 4*x0], ... geometrically around x0 until f
// changes sign. max_doublings bounds the expansion factor on each side.
template <class F>
Bracket expand_bracket(F&& f, double x0, int max_doublings = 20) {
  const double f0 = f(x0);
  if (!std::isfinite(f0)) throw BracketingError("expand_bracket: f(x0) not finite");
  if (f0 == 0.0) return {x0, x0, 0.0, 0.0};

  double lo_prev = x0, f_lo_prev = f0;
  double hi_prev = x0, f_hi_prev = f0;
  for (int i = 0; i < max_doublings; ++i) {
    const double lo = lo_prev * 0.5;
    const double f_lo = f(lo);
    if (!std::isfinite(f_lo)) throw BracketingError("expand_bracket: f not finite");
    if (std::signbit(f_lo) != std::signbit(f_lo_prev)) return {lo, lo_prev, f_lo, f_lo_prev};
    lo_prev = lo;
    f_lo_prev = f_lo;

    const double hi = hi_prev * 2.0;
    const double f_hi = f(hi);
    if (!std::isfinite(f_hi)) throw BracketingError("expand_bracket: f not finite");
    if (std::signbit(f_hi) != std::signbit(f_hi_prev)) return {hi_prev, hi, f_hi_prev, f_hi};
    hi_prev = hi;
    f_hi_prev = f_hi;
  }
  throw BracketingError("expand_bracket: no sign change found");
}

}  // namespace bgeps
