#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "slipt/errors.hpp"

namespace slipt {

struct RootResult {
  double x = 0.0;
  double f = 0.0;   ///< residual at x
  int iterations = 0;
};

/// Bisection on a bracket [lo, hi] with f(lo) and f(hi) of opposite sign
/// (one may be zero, infinities are tolerated at the endpoints).  Runs until
/// the bracket collapses to machine precision or `max_iter` halvings, so the
/// returned root carries essentially full double accuracy for monotone f.
template <class F>
RootResult bisect(F&& f, double lo, double hi, double flo, double fhi, int max_iter = 200) {
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw SolverError("bisect: endpoints do not bracket a sign change (f(lo)=" +
                      std::to_string(flo) + ", f(hi)=" + std::to_string(fhi) + ")");
  }
  double fm = flo;
  double mid = lo;
  int it = 0;
  for (; it < max_iter; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval collapsed
    fm = f(mid);
    if (fm == 0.0) return {mid, 0.0, it + 1};
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return {0.5 * (lo + hi), fm, it};
}

/// Brent's method on a bracket [a, b].  Stops when |f| <= ftol or the bracket
/// width falls below xtol_abs + xtol_rel*|x|.
template <class F>
RootResult brent(F&& f, double a, double b, double fa, double fb, double xtol_abs,
                 double xtol_rel, double ftol, int max_iter = 200) {
  if (fa == 0.0) return {a, 0.0, 0};
  if (fb == 0.0) return {b, 0.0, 0};
  if (std::signbit(fa) == std::signbit(fb)) {
    throw SolverError("brent: endpoints do not bracket a sign change");
  }
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                       0.5 * (xtol_abs + xtol_rel * std::abs(b));
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || std::abs(fb) <= ftol) return {b, fb, it};
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = e = m;  // bisection step
    } else {
      double p, q;
      const double s = fb / fa;
      if (a == c) {  // secant
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {  // inverse quadratic
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = e = m;
      }
    }
    a = b; fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
    if (std::signbit(fb) == std::signbit(fc)) {
      c = a; fc = fa;
      d = e = b - a;
    }
  }
  return {b, fb, max_iter};
}

/// Golden-section maximization of a unimodal function on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, double xtol, int max_iter = 300) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace slipt
