#include "slipt/lambertw.hpp"

#include <cmath>
#include <limits>

#include "slipt/errors.hpp"

namespace slipt {

/*
 * Solve  w + ln w = y  for w > 0 (equivalent to w e^w = e^y).
 *
 * Seeds:
 *   y <= -20 : w ~= e^y (1 - e^y), relative error < e^-20
 *   y <=  2.5: w0 = ln(1 + e^y), within ~25% of the root everywhere here
 *   y >   2.5: asymptotic w0 = y - ln y + ln(y)/y
 *
 * Then Halley iteration on f(w) = w + ln w - y:
 *   f' = 1 + 1/w,  f'' = -1/w^2
 *   w <- w - 2 f f' / (2 f'^2 - f f'')
 * which is cubically convergent; 2-4 iterations reach a few ulp.
 */
double lambert_w0_exp(double y) {
  if (std::isnan(y)) throw DomainError("lambert_w0_exp: NaN argument");
  if (y == std::numeric_limits<double>::infinity()) {
    throw DomainError("lambert_w0_exp: infinite argument");
  }

  double w;
  if (y <= -20.0) {
    // Far tail: the truncated series is already below double round-off
    // (relative error ~1.5 z^2 < 1e-17), and Halley's 1/w^2 would overflow.
    const double z = std::exp(y);
    const double series = z * (1.0 - z);
    return series > 0.0 ? series : z;
  } else if (y <= 2.5) {
    w = std::log1p(std::exp(y));
  } else {
    const double ly = std::log(y);
    w = y - ly + ly / y;
  }

  for (int it = 0; it < 64; ++it) {
    const double lw = std::log(w);
    const double f = w + lw - y;
    const double fp = 1.0 + 1.0 / w;
    const double fpp = -1.0 / (w * w);
    const double step = 2.0 * f * fp / (2.0 * fp * fp - f * fpp);
    const double w_next = w - step;
    if (!(w_next > 0.0)) {  // fall back to a damped step if Halley overshoots
      w *= 0.5;
      continue;
    }
    w = w_next;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * w) break;
  }
  return w;
}

double lambert_w0(double x) {
  if (x < 0.0) throw DomainError("lambert_w0: negative argument (positive branch only)");
  if (x == 0.0) return 0.0;
  return lambert_w0_exp(std::log(x));
}

}  // namespace slipt
