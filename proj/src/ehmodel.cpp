#include "slipt/ehmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slipt/lambertw.hpp"
#include "slipt/quadrature.hpp"
#include "slipt/roots.hpp"

namespace slipt {

namespace {

constexpr double kExpGuard = 700.0;

// Currents below this are treated as identically zero operating points.
bool all_zero(const std::vector<double>& j) {
  for (double x : j) {
    if (x != 0.0) return false;
  }
  return true;
}

double max_abs(const std::vector<double>& j) {
  double m = 0.0;
  for (double x : j) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

const char* to_string(EhModelKind kind) {
  switch (kind) {
    case EhModelKind::accurate: return "accurate";
    case EhModelKind::approximate: return "approximate";
    case EhModelKind::closed_form_single: return "closed_single";
    case EhModelKind::closed_form_multi: return "closed_multi";
    case EhModelKind::baseline_single_diode: return "baseline_single_diode";
    case EhModelKind::baseline_mpp: return "baseline_mpp";
  }
  return "?";
}

EhModelKind eh_model_from_string(const std::string& name) {
  if (name == "accurate") return EhModelKind::accurate;
  if (name == "approximate") return EhModelKind::approximate;
  if (name == "closed_single") return EhModelKind::closed_form_single;
  if (name == "closed_multi") return EhModelKind::closed_form_multi;
  if (name == "baseline_single_diode") return EhModelKind::baseline_single_diode;
  if (name == "baseline_mpp") return EhModelKind::baseline_mpp;
  throw ConfigError("unknown EH model '" + name + "'");
}

EhSolution make_eh_solution(EhModelKind kind, double i_eh, std::vector<double> v, double r_l,
                            double residual) {
  EhSolution sol;
  sol.i_eh = i_eh;
  sol.v = std::move(v);
  sol.p_harv = r_l * i_eh * i_eh;
  sol.model = kind;
  sol.residual = residual;
  return sol;
}

double phi_clamped(double v, const JunctionSpec& jn, double j_n, double v_t,
                   bool* clamped) noexcept {
  const double a1 = std::min(v / v_t, kExpGuard);
  const double a2 = std::min(v / (2.0 * v_t), kExpGuard);
  if (clamped) *clamped = (v / v_t > kExpGuard);
  return j_n - jn.i_sat1 * std::expm1(a1) - jn.i_sat2 * std::expm1(a2) - v / jn.r_sh;
}

double phi(double v, const JunctionSpec& jn, double j_n, double v_t) {
  if (!std::isfinite(v)) throw DomainError("phi: non-finite voltage");
  bool clamped = false;
  const double out = phi_clamped(v, jn, j_n, v_t, &clamped);
  if (clamped) {
    throw SaturationError("phi: exponent v/v_t = " + std::to_string(v / v_t) +
                              " beyond the +700 overflow guard",
                          v > 0 ? +1 : -1);
  }
  return out;
}

double phi_derivative(double v, const JunctionSpec& jn, double v_t) noexcept {
  const double a1 = std::min(v / v_t, kExpGuard);
  const double a2 = std::min(v / (2.0 * v_t), kExpGuard);
  return -jn.i_sat1 / v_t * std::exp(a1) - jn.i_sat2 / (2.0 * v_t) * std::exp(a2) - 1.0 / jn.r_sh;
}

double phi_inverse(double i, const JunctionSpec& jn, double j_n, double v_t) {
  if (!std::isfinite(i)) throw DomainError("phi_inverse: non-finite current");
  const double f0 = j_n - i;  // phi(0) - i
  if (f0 == 0.0) return 0.0;

  double lo, hi, flo, fhi;
  if (f0 > 0.0) {
    // Root at positive voltage: expand upward until phi drops below i.
    lo = 0.0;
    flo = f0;
    hi = v_t;
    fhi = phi_clamped(hi, jn, j_n, v_t) - i;
    int guard = 0;
    while (fhi > 0.0) {
      lo = hi;
      flo = fhi;
      hi *= 2.0;
      fhi = phi_clamped(hi, jn, j_n, v_t) - i;
      if (++guard > 200) {
        throw SolverError("phi_inverse: bracket expansion failed upward (i=" +
                          std::to_string(i) + ", j=" + std::to_string(j_n) + ")");
      }
    }
  } else {
    // Root at negative voltage (reverse-biased junction).
    hi = 0.0;
    fhi = f0;
    lo = -v_t;
    flo = phi_clamped(lo, jn, j_n, v_t) - i;
    int guard = 0;
    while (flo < 0.0) {
      hi = lo;
      fhi = flo;
      lo *= 2.0;
      flo = phi_clamped(lo, jn, j_n, v_t) - i;
      if (++guard > 200) {
        throw SolverError("phi_inverse: bracket expansion failed downward (i=" +
                          std::to_string(i) + ", j=" + std::to_string(j_n) + ")");
      }
    }
  }

  const auto res = bisect([&](double v) { return phi_clamped(v, jn, j_n, v_t) - i; }, lo, hi,
                          flo, fhi);
  const double tol = std::max(1e-15, 1e-12 * std::abs(i));
  if (std::abs(phi_clamped(res.x, jn, j_n, v_t) - i) > tol) {
    throw SolverError("phi_inverse: residual " + std::to_string(res.f) +
                      " above tolerance at v=" + std::to_string(res.x));
  }
  return res.x;
}

std::vector<double> junction_currents(const PhotocurrentState& state, double s,
                                      const ReceiverSpec& rx) {
  if (state.j_a.size() != rx.junctions.size()) {
    throw ConfigError("junction_currents: photocurrent state does not match receiver");
  }
  std::vector<double> j = state.j_a;
  j[static_cast<std::size_t>(rx.info_junction)] += state.g_s * s;
  return j;
}

EhSolution solve_accurate_currents(const std::vector<double>& j, const ReceiverSpec& rx) {
  const int n = rx.n();
  if (static_cast<int>(j.size()) != n) {
    throw ConfigError("solve_accurate: current vector size mismatch");
  }
  if (all_zero(j)) {
    return make_eh_solution(EhModelKind::accurate, 0.0, std::vector<double>(j.size(), 0.0),
                            rx.r_l, 0.0);
  }
  const double r_sigma = rx.r_sigma();

  // g(i) = i*R_Sigma - sum_n Phi_n^{-1}(i): strictly increasing, unique root.
  auto g = [&](double i) {
    double sum_v = 0.0;
    for (int k = 0; k < n; ++k) {
      sum_v += phi_inverse(i, rx.junctions[static_cast<std::size_t>(k)],
                           j[static_cast<std::size_t>(k)], rx.v_t);
    }
    return i * r_sigma - sum_v;
  };

  double lo = 0.0;
  double flo = g(lo);
  if (flo == 0.0) {
    std::vector<double> v(j.size());
    for (int k = 0; k < n; ++k) {
      v[static_cast<std::size_t>(k)] =
          phi_inverse(0.0, rx.junctions[static_cast<std::size_t>(k)], j[static_cast<std::size_t>(k)],
                      rx.v_t);
    }
    return make_eh_solution(EhModelKind::accurate, 0.0, std::move(v), rx.r_l, 0.0);
  }
  const double scale = std::max(max_abs(j), 1e-6);
  double lo_probe = -scale;
  while (flo > 0.0) {
    // Negative-current branch (only reachable with negative drive currents).
    lo = lo_probe;
    flo = g(lo);
    lo_probe *= 2.0;
    if (lo < -1e3 * scale) throw SolverError("solve_accurate: no lower bracket");
  }

  double i_sat_max = 0.0;
  for (const auto& jn : rx.junctions) i_sat_max = std::max(i_sat_max, jn.i_sat1 + jn.i_sat2);
  double hi = std::max(max_abs(j) + 2.0 * i_sat_max, 1e-12);
  double fhi = g(hi);
  int guard = 0;
  while (fhi < 0.0) {
    hi *= 2.0;
    if (hi > 1e3 * scale) {
      throw SolverError("solve_accurate: upper bracket exceeded 1e3 * max |j| without sign change");
    }
    fhi = g(hi);
    if (++guard > 200) throw SolverError("solve_accurate: bracket expansion failed");
  }
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw SolverError("solve_accurate: sign-change invariant violated on the bracket");
  }

  const auto root = bisect(g, lo, hi, flo, fhi);
  std::vector<double> v(j.size());
  for (int k = 0; k < n; ++k) {
    v[static_cast<std::size_t>(k)] =
        phi_inverse(root.x, rx.junctions[static_cast<std::size_t>(k)],
                    j[static_cast<std::size_t>(k)], rx.v_t);
  }
  return make_eh_solution(EhModelKind::accurate, root.x, std::move(v), rx.r_l, root.f);
}

EhSolution solve_accurate(const PhotocurrentState& state, double s, const ReceiverSpec& rx) {
  return solve_accurate_currents(junction_currents(state, s, rx), rx);
}

EhSolution solve_approximate_currents(const std::vector<double>& j, const ReceiverSpec& rx) {
  const int n = rx.n();
  if (static_cast<int>(j.size()) != n) {
    throw ConfigError("solve_approximate: current vector size mismatch");
  }
  if (all_zero(j)) {
    return make_eh_solution(EhModelKind::approximate, 0.0, std::vector<double>(j.size(), 0.0),
                            rx.r_l, 0.0);
  }
  const double r_sigma = rx.r_sigma();

  // Identical-saturation-current reduction: I_n := i_sat1.
  std::vector<double> i_sat(j.size());
  for (int k = 0; k < n; ++k) {
    i_sat[static_cast<std::size_t>(k)] = rx.junctions[static_cast<std::size_t>(k)].i_sat1;
  }

  // Product equation in log form:
  //   g(i) = sum_n ln(j_n - i + I_n) - (R_Sigma/V_T) i - sum_n ln I_n,
  // strictly decreasing, with g -> -inf as i approaches min_n(j_n + I_n).
  auto g = [&](double i) {
    double acc = -r_sigma * i / rx.v_t;
    for (int k = 0; k < n; ++k) {
      const double arg = j[static_cast<std::size_t>(k)] - i + i_sat[static_cast<std::size_t>(k)];
      if (arg <= 0.0) return -std::numeric_limits<double>::infinity();
      acc += std::log(arg) - std::log(i_sat[static_cast<std::size_t>(k)]);
    }
    return acc;
  };

  double hi = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    hi = std::min(hi, j[static_cast<std::size_t>(k)] + i_sat[static_cast<std::size_t>(k)]);
  }

  double lo = 0.0;
  double flo = g(lo);
  if (flo == 0.0) {
    return make_eh_solution(EhModelKind::approximate, 0.0, std::vector<double>(j.size(), 0.0),
                            rx.r_l, 0.0);
  }
  if (flo < 0.0) {
    // Negative drive currents push the root below zero.
    double step = std::max(max_abs(j), 1e-9);
    double probe = -step;
    int guard = 0;
    while (g(probe) < 0.0) {
      probe *= 2.0;
      if (++guard > 200) throw SolverError("solve_approximate: no lower bracket");
    }
    lo = probe;
    flo = g(lo);
  }
  const double fhi = g(hi);

  const auto root = bisect(g, lo, hi, flo, fhi);
  std::vector<double> v(j.size());
  for (int k = 0; k < n; ++k) {
    v[static_cast<std::size_t>(k)] =
        rx.v_t * std::log((j[static_cast<std::size_t>(k)] - root.x + i_sat[static_cast<std::size_t>(k)]) /
                          i_sat[static_cast<std::size_t>(k)]);
  }
  return make_eh_solution(EhModelKind::approximate, root.x, std::move(v), rx.r_l, root.f);
}

EhSolution solve_approximate(const PhotocurrentState& state, double s, const ReceiverSpec& rx) {
  return solve_approximate_currents(junction_currents(state, s, rx), rx);
}

namespace {

// i* = j + I1 - (V_T/R_Sigma) W0( (I1 R_Sigma/V_T) exp[(R_Sigma/V_T)(j + I1)] ),
// with the W argument passed in the log domain.
EhSolution lambert_closed_form(EhModelKind kind, double j, const ReceiverSpec& rx) {
  const JunctionSpec& jn = rx.junctions.front();
  const double i1 = jn.i_sat1;
  const double r_sigma = rx.r_sigma();
  if (j == 0.0) {
    // W0(x e^x) = x collapses the expression exactly.
    return make_eh_solution(kind, 0.0, {0.0}, rx.r_l, 0.0);
  }
  const double a = r_sigma / rx.v_t;
  const double y = std::log(i1 * a) + a * (j + i1);
  const double w = lambert_w0_exp(y);
  const double i = j + i1 - w / a;
  const double residual = std::log((j - i + i1) / i1) - a * i;  // Eq. in log form
  return make_eh_solution(kind, i, {i * r_sigma}, rx.r_l, residual);
}

}  // namespace

EhSolution closed_form_single(const PhotocurrentState& state, double s, const ReceiverSpec& rx) {
  if (rx.n() != 1) {
    throw ModelMismatchError("closed_form_single: requires a single-junction receiver");
  }
  const double j = junction_currents(state, s, rx)[0];
  return lambert_closed_form(EhModelKind::closed_form_single, j, rx);
}

EhSolution baseline_single_diode(const PhotocurrentState& state, double s,
                                 const ReceiverSpec& rx) {
  if (rx.n() != 1) {
    throw ModelMismatchError("baseline_single_diode: requires a single-junction receiver");
  }
  // With the recombination diode removed, the junction law is
  // I1 e^{v/Vt} + i - j - I1 = 0, whose fixed point is the same Lambert form:
  // the two-diode reduction and the diffusion-only model share one closed form.
  const double j = junction_currents(state, s, rx)[0];
  return lambert_closed_form(EhModelKind::baseline_single_diode, j, rx);
}

EhSolution closed_form_multi(const PhotocurrentState& state, double s, const ReceiverSpec& rx) {
  const std::vector<double> j = junction_currents(state, s, rx);
  const double r_sigma = rx.r_sigma();
  double sum = 0.0;
  std::vector<double> v(j.size());
  bool low_current = false;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const double i_n = rx.junctions[k].i_sat1;
    const double term = rx.v_t * std::log1p(j[k] / i_n);
    v[k] = term;
    sum += term;
    if (!(j[k] > 100.0 * i_n)) low_current = true;
  }
  EhSolution sol = make_eh_solution(EhModelKind::closed_form_multi, sum / r_sigma, std::move(v),
                                    rx.r_l, 0.0);
  if (low_current) {
    sol.warning = "closed_multi: some junction current is not >> its saturation current; "
                  "the high-current approximation degrades here";
  }
  return sol;
}

double mpp_power_raw(const JunctionSpec& jn, double j, double v_t) {
  if (!(j > 0.0)) return 0.0;  // Phi(v) <= 0 for all v >= 0
  const double v_oc = phi_inverse(0.0, jn, j, v_t);
  const double v_star = golden_max(
      [&](double v) { return v * phi_clamped(v, jn, j, v_t); }, 0.0, v_oc, 1e-14 * v_oc);
  return v_star * phi_clamped(v_star, jn, j, v_t);
}

namespace {

double mpp_voltage(const JunctionSpec& jn, double j, double v_t) {
  if (!(j > 0.0)) return 0.0;
  const double v_oc = phi_inverse(0.0, jn, j, v_t);
  return golden_max([&](double v) { return v * phi_clamped(v, jn, j, v_t); }, 0.0, v_oc,
                    1e-14 * v_oc);
}

// Scaling that pins the MPP baseline to the single-junction closed form at the
// calibration point s = 100 mW with no ambient/energy contribution.
double mpp_calibration(const PhotocurrentState& state, const ReceiverSpec& rx) {
  const double j_cal = state.g_s * 0.1;
  if (!(j_cal > 0.0)) {
    throw SolverError("baseline_mpp: calibration needs a positive information-current gain");
  }
  const double p_ref = lambert_closed_form(EhModelKind::closed_form_single, j_cal, rx).p_harv;
  const double p_raw = mpp_power_raw(rx.junctions.front(), j_cal, rx.v_t);
  return p_ref / p_raw;
}

}  // namespace

double baseline_mpp(const PhotocurrentState& state, double s, const ReceiverSpec& rx) {
  if (rx.n() != 1) {
    throw ModelMismatchError("baseline_mpp: requires a single-junction receiver");
  }
  const double j = junction_currents(state, s, rx)[0];
  if (j == 0.0) return 0.0;
  return mpp_calibration(state, rx) * mpp_power_raw(rx.junctions.front(), j, rx.v_t);
}

EhSolution eval_eh_model(EhModelKind kind, const PhotocurrentState& state, double s,
                         const ReceiverSpec& rx) {
  switch (kind) {
    case EhModelKind::accurate: return solve_accurate(state, s, rx);
    case EhModelKind::approximate: return solve_approximate(state, s, rx);
    case EhModelKind::closed_form_single: return closed_form_single(state, s, rx);
    case EhModelKind::closed_form_multi: return closed_form_multi(state, s, rx);
    case EhModelKind::baseline_single_diode: return baseline_single_diode(state, s, rx);
    case EhModelKind::baseline_mpp: {
      const double p = baseline_mpp(state, s, rx);
      return make_eh_solution(kind, std::sqrt(p / rx.r_l), {}, rx.r_l, 0.0);
    }
  }
  throw ConfigError("eval_eh_model: unknown model kind");
}

double pharv_at_js(EhModelKind kind, const PhotocurrentState& state, const ReceiverSpec& rx,
                   double js) {
  PhotocurrentState shifted = state;
  shifted.j_a[static_cast<std::size_t>(rx.info_junction)] += js;
  switch (kind) {
    case EhModelKind::baseline_mpp: {
      const double j = shifted.j_a[static_cast<std::size_t>(rx.info_junction)];
      if (rx.n() != 1) throw ModelMismatchError("baseline_mpp: requires N = 1");
      if (j == 0.0) return 0.0;
      const double p = mpp_calibration(state, rx) * mpp_power_raw(rx.junctions.front(), j, rx.v_t);
      // Same normalization as the EhSolution path keeps both routes bit-identical.
      const double i = std::sqrt(p / rx.r_l);
      return rx.r_l * i * i;
    }
    default:
      return eval_eh_model(kind, shifted, 0.0, rx).p_harv;
  }
}

double dp_harv_djs(EhModelKind kind, const PhotocurrentState& state, double s,
                   const ReceiverSpec& rx) {
  return dp_harv_djs_at(kind, state, rx, state.g_s * s);
}

double dp_harv_djs_at(EhModelKind kind, const PhotocurrentState& state, const ReceiverSpec& rx,
                      double js) {
  double d = 0.0;
  switch (kind) {
    case EhModelKind::closed_form_single:
    case EhModelKind::baseline_single_diode: {
      if (rx.n() != 1) throw ModelMismatchError("dp_harv_djs: requires N = 1 for this model");
      const double j = state.j_a[0] + js;
      const JunctionSpec& jn = rx.junctions.front();
      const double a = rx.r_sigma() / rx.v_t;
      if (j == 0.0) {
        d = 0.0;  // i = 0 there, and dP/dj = 2 R_L i / (1 + W) vanishes with i
      } else {
        const double y = std::log(jn.i_sat1 * a) + a * (j + jn.i_sat1);
        const double w = lambert_w0_exp(y);
        const double i = j + jn.i_sat1 - w / a;
        d = 2.0 * rx.r_l * i / (1.0 + w);
      }
      break;
    }
    case EhModelKind::closed_form_multi: {
      const double p_harv = pharv_at_js(kind, state, rx, js);
      const std::size_t info = static_cast<std::size_t>(rx.info_junction);
      const double i_info = rx.junctions[info].i_sat1;
      const double denom = state.j_a[info] + js + i_info;
      // dP/dj = 2 sqrt(P R_L) (V_T/R_Sigma) / (j^s + j^a_info + I_info)
      d = 2.0 * std::sqrt(p_harv * rx.r_l) * (rx.v_t / rx.r_sigma()) / denom;
      break;
    }
    case EhModelKind::baseline_mpp: {
      // Envelope theorem: d/dj max_v v*Phi(v; j) = v*(j).
      const double j = state.j_a[static_cast<std::size_t>(rx.info_junction)] + js;
      if (!(j > 0.0)) return 0.0;
      d = mpp_calibration(state, rx) * mpp_voltage(rx.junctions.front(), j, rx.v_t);
      break;
    }
    case EhModelKind::accurate:
    case EhModelKind::approximate: {
      const double h = std::max(1e-6 * std::abs(js), 1e-12);
      const double pm2 = pharv_at_js(kind, state, rx, js - 2.0 * h);
      const double pm1 = pharv_at_js(kind, state, rx, js - h);
      const double pp1 = pharv_at_js(kind, state, rx, js + h);
      const double pp2 = pharv_at_js(kind, state, rx, js + 2.0 * h);
      d = (-pp2 + 8.0 * pp1 - 8.0 * pm1 + pm2) / (12.0 * h);
      break;
    }
  }
  return std::max(d, 0.0);
}

double fit_saturation_current(const JunctionSpec& jn, double v_t, double v_lo, double v_hi) {
  if (!(v_lo < v_hi)) throw DomainError("fit_saturation_current: require v_lo < v_hi");
  const double i_min = std::min(jn.i_sat1, jn.i_sat2);
  const double i_max = std::max(jn.i_sat1, jn.i_sat2);
  if (i_min == i_max) return i_min;
  auto mismatch = [&](double i_fit) {
    return integrate(
        [&](double v) {
          const double e1 = std::exp(std::min(v / v_t, kExpGuard));
          const double e2 = std::exp(std::min(v / (2.0 * v_t), kExpGuard));
          return std::abs(jn.i_sat1 * e1 + jn.i_sat2 * e2 - i_fit * (e1 + e2));
        },
        v_lo, v_hi, {1e-9, 1e-24, 40});
  };
  // E(I) is convex in I; golden section on -E finds the minimizer.
  return golden_max([&](double i_fit) { return -mismatch(i_fit); }, i_min, i_max,
                    1e-12 * i_max);
}

}  // namespace slipt
