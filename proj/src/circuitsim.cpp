#include "slipt/circuitsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slipt/roots.hpp"

namespace slipt {

namespace {

/// In-place Gaussian elimination with partial pivoting; a is row-major n x n,
/// b becomes the solution.  Sizes here are tiny (N + 3 at most).
void solve_dense(std::vector<double>& a, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a[static_cast<std::size_t>(col * n + col)]);
    for (int r = col + 1; r < n; ++r) {
      const double cand = std::abs(a[static_cast<std::size_t>(r * n + col)]);
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (best == 0.0) throw SolverError("solve_dense: singular Jacobian");
    if (pivot != col) {
      for (int c = col; c < n; ++c) {
        std::swap(a[static_cast<std::size_t>(col * n + c)], a[static_cast<std::size_t>(pivot * n + c)]);
      }
      std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(pivot)]);
    }
    const double inv = 1.0 / a[static_cast<std::size_t>(col * n + col)];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[static_cast<std::size_t>(r * n + col)] * inv;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) {
        a[static_cast<std::size_t>(r * n + c)] -= f * a[static_cast<std::size_t>(col * n + c)];
      }
      b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < n; ++c) {
      acc -= a[static_cast<std::size_t>(r * n + c)] * b[static_cast<std::size_t>(c)];
    }
    b[static_cast<std::size_t>(r)] = acc / a[static_cast<std::size_t>(r * n + r)];
  }
}

}  // namespace

DcOperatingPoint solve_dc(const ReceiverSpec& rx, const std::vector<double>& j) {
  rx.validate();
  const int n = rx.n();
  if (static_cast<int>(j.size()) != n) throw ConfigError("solve_dc: current vector size mismatch");
  for (double jn : j) {
    if (!(jn >= 0.0)) throw DomainError("solve_dc: photocurrents must be >= 0");
  }
  const double r_sigma = rx.r_sigma();
  const int m = n + 1;  // unknowns: v_1..v_N, i

  std::vector<double> x(static_cast<std::size_t>(m), 0.0);
  std::vector<double> f(static_cast<std::size_t>(m), 0.0);
  std::vector<double> jac;
  std::vector<double> step;

  auto residual = [&](const std::vector<double>& z, std::vector<double>& out) {
    const double i = z[static_cast<std::size_t>(n)];
    double sum_v = 0.0;
    for (int k = 0; k < n; ++k) {
      const double v = z[static_cast<std::size_t>(k)];
      out[static_cast<std::size_t>(k)] =
          phi_clamped(v, rx.junctions[static_cast<std::size_t>(k)], j[static_cast<std::size_t>(k)],
                      rx.v_t) -
          i;
      sum_v += v;
    }
    out[static_cast<std::size_t>(n)] = sum_v / r_sigma - i;  // KCL row scaled to amperes
  };

  auto norm_inf = [&](const std::vector<double>& z) {
    double mx = 0.0;
    for (double v : z) mx = std::max(mx, std::abs(v));
    return mx;
  };

  // Convergence target: 1e-12 relative on the current, but never below the
  // double-precision evaluation noise of Phi at the drive-current scale.
  double j_scale = 1e-6;
  for (double jn : j) j_scale = std::max(j_scale, jn);
  const double eval_floor = 64.0 * std::numeric_limits<double>::epsilon() * j_scale;
  auto target = [&](double i) { return std::max(1e-12 * std::max(1e-6, std::abs(i)), eval_floor); };

  residual(x, f);
  double fnorm = norm_inf(f);
  int it = 0;
  for (; it < 200; ++it) {
    if (fnorm <= target(x[static_cast<std::size_t>(n)])) break;

    jac.assign(static_cast<std::size_t>(m * m), 0.0);
    for (int k = 0; k < n; ++k) {
      jac[static_cast<std::size_t>(k * m + k)] =
          phi_derivative(x[static_cast<std::size_t>(k)], rx.junctions[static_cast<std::size_t>(k)], rx.v_t);
      jac[static_cast<std::size_t>(k * m + n)] = -1.0;
    }
    for (int k = 0; k < n; ++k) jac[static_cast<std::size_t>(n * m + k)] = 1.0 / r_sigma;
    jac[static_cast<std::size_t>(n * m + n)] = -1.0;

    step = f;
    for (double& s : step) s = -s;
    solve_dense(jac, step, m);

    // Line search: halve the step until the residual norm decreases.
    double alpha = 1.0;
    std::vector<double> trial(x.size());
    std::vector<double> ftrial(f.size());
    bool accepted = false;
    for (int halvings = 0; halvings < 100; ++halvings) {
      for (int k = 0; k < m; ++k) {
        trial[static_cast<std::size_t>(k)] =
            x[static_cast<std::size_t>(k)] + alpha * step[static_cast<std::size_t>(k)];
      }
      residual(trial, ftrial);
      const double fnew = norm_inf(ftrial);
      if (fnew < fnorm) {
        x = trial;
        f = ftrial;
        fnorm = fnew;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // round-off floor reached; the final check decides
  }
  if (fnorm > target(x[static_cast<std::size_t>(n)])) {
    throw SolverError("solve_dc: no convergence after damped Newton iterations, residual " +
                      std::to_string(fnorm) + " A at i=" +
                      std::to_string(x[static_cast<std::size_t>(n)]));
  }

  DcOperatingPoint op;
  op.v.assign(x.begin(), x.begin() + n);
  op.i_eh = x[static_cast<std::size_t>(n)];
  op.iterations = it;
  op.residual_norm = fnorm;
  return op;
}

namespace {

// Node consistency given the differential states (v_C, i_L): find i_out with
//   R_d (i_out - i_L) = sum_n Phi_n^{-1}(i_out) - i_out R_s_tot - v_C.
// The left side increases and the right side decreases in i_out, so the
// mismatch H is strictly increasing with a single zero.
double consistent_i_out(const ReceiverSpec& rx, const std::vector<double>& j, double v_c,
                        double i_l, double rs_tot) {
  auto h = [&](double i_out) {
    double sum_v = 0.0;
    for (std::size_t k = 0; k < rx.junctions.size(); ++k) {
      sum_v += phi_inverse(i_out, rx.junctions[k], j[k], rx.v_t);
    }
    return rx.r_d * (i_out - i_l) - (sum_v - i_out * rs_tot - v_c);
  };
  double b = 1e-6;
  for (double jn : j) b = std::max(b, std::abs(jn));
  b = std::max(b, std::abs(i_l)) * 2.0 + 1e-6;
  double lo = -b, hi = b;
  double flo = h(lo), fhi = h(hi);
  int guard = 0;
  while (flo > 0.0 || fhi < 0.0) {
    if (flo > 0.0) {
      lo *= 4.0;
      flo = h(lo);
    }
    if (fhi < 0.0) {
      hi *= 4.0;
      fhi = h(hi);
    }
    if (++guard > 100) throw SolverError("consistent_i_out: bracket expansion failed");
  }
  return bisect(h, lo, hi, flo, fhi).x;
}

}  // namespace

TransientTrace simulate_transient(const ReceiverSpec& rx, const PhotocurrentState& state,
                                  const std::vector<double>& symbols, double symbol_period,
                                  const TransientOptions& opt) {
  rx.validate();
  if (symbols.empty()) throw DomainError("simulate_transient: empty symbol sequence");
  if (!(symbol_period > 0.0)) throw DomainError("simulate_transient: symbol period must be positive");
  double dt = opt.dt > 0.0 ? opt.dt : symbol_period / 1e4;
  if (dt > symbol_period / 1000.0) {
    throw DomainError("simulate_transient: dt must be <= symbol_period / 1000");
  }
  const int n = rx.n();
  const std::size_t steps_per_slot =
      static_cast<std::size_t>(std::llround(symbol_period / dt));
  dt = symbol_period / static_cast<double>(steps_per_slot);  // land exactly on boundaries

  double rs_tot = 0.0;
  for (const auto& jn : rx.junctions) rs_tot += jn.r_s;

  const std::size_t total_steps = steps_per_slot * symbols.size();
  const std::size_t stride = std::max<std::size_t>(1, total_steps / opt.max_samples);

  // Per-slot drive currents.
  auto drive = [&](std::size_t slot) {
    std::vector<double> j = state.j_a;
    j[static_cast<std::size_t>(rx.info_junction)] += state.g_s * symbols[slot];
    return j;
  };

  // Initial differential state.
  double v_c = 0.0, i_l = 0.0;
  if (!opt.cold_start) {
    const DcOperatingPoint dc = solve_dc(rx, drive(0));
    i_l = dc.i_eh;
    v_c = rx.r_l * dc.i_eh;
  }

  const int m = n + 3;  // unknowns: v_1..v_N, v_C, i_L, i_out
  std::vector<double> z(static_cast<std::size_t>(m), 0.0);
  std::vector<double> f(static_cast<std::size_t>(m), 0.0);
  std::vector<double> jac, delta;

  auto pack_algebraic = [&](const std::vector<double>& j) {
    const double i_out = consistent_i_out(rx, j, v_c, i_l, rs_tot);
    for (int k = 0; k < n; ++k) {
      z[static_cast<std::size_t>(k)] =
          phi_inverse(i_out, rx.junctions[static_cast<std::size_t>(k)], j[static_cast<std::size_t>(k)],
                      rx.v_t);
    }
    z[static_cast<std::size_t>(n)] = v_c;
    z[static_cast<std::size_t>(n + 1)] = i_l;
    z[static_cast<std::size_t>(n + 2)] = i_out;
  };

  auto node_voltage = [&](const std::vector<double>& zz) {
    double sum_v = 0.0;
    for (int k = 0; k < n; ++k) sum_v += zz[static_cast<std::size_t>(k)];
    return sum_v - zz[static_cast<std::size_t>(n + 2)] * rs_tot;
  };

  TransientTrace trace;
  trace.slots.reserve(symbols.size());
  const std::size_t reserve = total_steps / stride + symbols.size() + 2;
  trace.t.reserve(reserve);
  trace.i_out.reserve(reserve);
  trace.i_eh.reserve(reserve);
  trace.i_id.reserve(reserve);
  trace.v_c.reserve(reserve);

  auto sample = [&](double t) {
    trace.t.push_back(t);
    trace.i_out.push_back(z[static_cast<std::size_t>(n + 2)]);
    trace.i_eh.push_back(z[static_cast<std::size_t>(n + 1)]);
    trace.i_id.push_back(z[static_cast<std::size_t>(n + 2)] - z[static_cast<std::size_t>(n + 1)]);
    trace.v_c.push_back(z[static_cast<std::size_t>(n)]);
  };

  double energy_acc = 0.0;       // trapezoid of R_L i_L^2 over the trailing half
  const std::size_t half_step = total_steps / 2;

  std::size_t step_index = 0;
  for (std::size_t slot = 0; slot < symbols.size(); ++slot) {
    const std::vector<double> j = drive(slot);
    // The drive jumps at the slot boundary; carry the continuous states over
    // and re-solve the algebraic variables for the new symbol.
    if (slot > 0) {
      v_c = z[static_cast<std::size_t>(n)];
      i_l = z[static_cast<std::size_t>(n + 1)];
    }
    pack_algebraic(j);
    if (slot == 0) sample(0.0);

    SlotRecord rec;
    double i_id_old = z[static_cast<std::size_t>(n + 2)] - z[static_cast<std::size_t>(n + 1)];
    double u_old = node_voltage(z);
    rec.i_id_peak = std::abs(i_id_old);

    for (std::size_t s_in = 0; s_in < steps_per_slot; ++s_in, ++step_index) {
      const double t_new = (static_cast<double>(step_index) + 1.0) * dt;
      const double v_c_old = z[static_cast<std::size_t>(n)];
      const double i_l_old = z[static_cast<std::size_t>(n + 1)];
      const double di_l_old = u_old - rx.r_l * i_l_old;  // L * di_L/dt at the old point
      const double i_l2_old = i_l_old * i_l_old;

      // Newton on the implicit trapezoidal residual; previous state seeds it.
      bool converged = false;
      for (int newton = 0; newton < 100; ++newton) {
        const double i_out = z[static_cast<std::size_t>(n + 2)];
        const double i_id = i_out - z[static_cast<std::size_t>(n + 1)];
        const double u = node_voltage(z);
        for (int k = 0; k < n; ++k) {
          f[static_cast<std::size_t>(k)] =
              phi_clamped(z[static_cast<std::size_t>(k)], rx.junctions[static_cast<std::size_t>(k)],
                          j[static_cast<std::size_t>(k)], rx.v_t) -
              i_out;
        }
        f[static_cast<std::size_t>(n)] =
            (z[static_cast<std::size_t>(n)] - v_c_old) -
            dt / (2.0 * rx.c_d) * (i_id_old + i_id);
        f[static_cast<std::size_t>(n + 1)] =
            (z[static_cast<std::size_t>(n + 1)] - i_l_old) -
            dt / (2.0 * rx.l) * (di_l_old + (u - rx.r_l * z[static_cast<std::size_t>(n + 1)]));
        f[static_cast<std::size_t>(n + 2)] = rx.r_d * i_id - (u - z[static_cast<std::size_t>(n)]);

        jac.assign(static_cast<std::size_t>(m * m), 0.0);
        for (int k = 0; k < n; ++k) {
          jac[static_cast<std::size_t>(k * m + k)] = phi_derivative(
              z[static_cast<std::size_t>(k)], rx.junctions[static_cast<std::size_t>(k)], rx.v_t);
          jac[static_cast<std::size_t>(k * m + (n + 2))] = -1.0;
        }
        jac[static_cast<std::size_t>(n * m + n)] = 1.0;
        jac[static_cast<std::size_t>(n * m + (n + 1))] = dt / (2.0 * rx.c_d);
        jac[static_cast<std::size_t>(n * m + (n + 2))] = -dt / (2.0 * rx.c_d);
        for (int k = 0; k < n; ++k) {
          jac[static_cast<std::size_t>((n + 1) * m + k)] = -dt / (2.0 * rx.l);
        }
        jac[static_cast<std::size_t>((n + 1) * m + (n + 1))] = 1.0 + dt * rx.r_l / (2.0 * rx.l);
        jac[static_cast<std::size_t>((n + 1) * m + (n + 2))] = dt * rs_tot / (2.0 * rx.l);
        for (int k = 0; k < n; ++k) {
          jac[static_cast<std::size_t>((n + 2) * m + k)] = -1.0;
        }
        jac[static_cast<std::size_t>((n + 2) * m + n)] = 1.0;
        jac[static_cast<std::size_t>((n + 2) * m + (n + 1))] = -rx.r_d;
        jac[static_cast<std::size_t>((n + 2) * m + (n + 2))] = rx.r_d + rs_tot;

        delta = f;
        for (double& d : delta) d = -d;
        solve_dense(jac, delta, m);

        // Keep junction-voltage updates inside the exponential trust region.
        double vmax = 0.0;
        for (int k = 0; k < n; ++k) vmax = std::max(vmax, std::abs(delta[static_cast<std::size_t>(k)]));
        if (vmax > 0.25) {
          const double scale = 0.25 / vmax;
          for (double& d : delta) d *= scale;
        }

        bool done = vmax <= 0.25;  // a limited step cannot be the last one
        for (int k = 0; k < m; ++k) {
          z[static_cast<std::size_t>(k)] += delta[static_cast<std::size_t>(k)];
          if (std::abs(delta[static_cast<std::size_t>(k)]) >
              1e-12 * std::max(1.0, std::abs(z[static_cast<std::size_t>(k)]))) {
            done = false;
          }
        }
        if (done) {
          converged = true;
          break;
        }
      }
      if (!converged) {
        throw IntegratorError("simulate_transient: Newton failed at t=" + std::to_string(t_new),
                              t_new);
      }

      const double i_id_new = z[static_cast<std::size_t>(n + 2)] - z[static_cast<std::size_t>(n + 1)];
      rec.r += rx.r_d * 0.5 * dt * (i_id_old + i_id_new);
      rec.i_id_peak = std::max(rec.i_id_peak, std::abs(i_id_new));
      if (step_index >= half_step) {
        const double i_l2_new =
            z[static_cast<std::size_t>(n + 1)] * z[static_cast<std::size_t>(n + 1)];
        energy_acc += 0.5 * dt * (i_l2_old + i_l2_new);
      }

      i_id_old = i_id_new;
      u_old = node_voltage(z);

      if ((step_index + 1) % stride == 0 || step_index + 1 == total_steps) sample(t_new);
    }

    rec.i_id_end = i_id_old;
    rec.i_eh_end = z[static_cast<std::size_t>(n + 1)];
    rec.v_c_end = z[static_cast<std::size_t>(n)];
    trace.slots.push_back(rec);
  }

  const double half_span = dt * static_cast<double>(total_steps - half_step);
  trace.mean_eh_power_last_half = rx.r_l * energy_acc / half_span;
  return trace;
}

}  // namespace slipt
