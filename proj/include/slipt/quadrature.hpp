#pragma once

#include <cmath>

#include "slipt/errors.hpp"

namespace slipt {

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-18;
  int max_depth = 48;
};

namespace detail {

template <class F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth, const QuadratureOptions& opt) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h = b - a;
  const double left = (h / 12.0) * (fa + 4.0 * flm + fm);
  const double right = (h / 12.0) * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth >= opt.max_depth || std::abs(delta) <= 15.0 * tol) {
    // Richardson extrapolation of the two Simpson estimates.
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, opt) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, opt);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b].  The interval tolerance is
/// max(abs_tol, rel_tol * |coarse estimate|) and is halved on each split.
template <class F>
double integrate(F&& f, double a, double b, QuadratureOptions opt = {}) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw DomainError("integrate: require a <= b");
  }
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
    throw DomainError("integrate: non-finite integrand value");
  }
  const double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(whole));
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0, opt);
}

}  // namespace slipt
