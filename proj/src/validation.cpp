#include "slipt/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "slipt/circuitsim.hpp"
#include "slipt/config.hpp"
#include "slipt/infotheory.hpp"
#include "slipt/lambertw.hpp"
#include "slipt/quadrature.hpp"
#include "slipt/rng.hpp"
#include "slipt/roots.hpp"
#include "slipt/spectral.hpp"

namespace slipt {

namespace {

double rel_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

struct Setup {
  RunConfig cfg1 = default_config(1);
  RunConfig cfg4 = default_config(4);
  ReceiverSpec rx_model1, rx_model4;  // series resistance scaled by the fault knob
  ValidationOptions opt;

  explicit Setup(const ValidationOptions& o) : opt(o) {
    rx_model1 = cfg1.receiver;
    rx_model4 = cfg4.receiver;
    for (auto& jn : rx_model1.junctions) jn.r_s *= o.fault_rsigma_scale;
    for (auto& jn : rx_model4.junctions) jn.r_s *= o.fault_rsigma_scale;
  }

  const ReceiverSpec& rx_oracle(int n) const { return n == 1 ? cfg1.receiver : cfg4.receiver; }
  const ReceiverSpec& rx_model(int n) const { return n == 1 ? rx_model1 : rx_model4; }

  PhotocurrentState state(int n, double mu_a, double p) const {
    const RunConfig& cfg = (n == 1) ? cfg1 : cfg4;
    EnergySignal energy;
    for (const auto& jn : cfg.receiver.junctions) {
      energy.lines.push_back({jn.band.midpoint(), p / cfg.receiver.n(), 1.0});
    }
    return photocurrents(cfg.receiver, AmbientModel{mu_a}, energy, cfg.info);
  }

  EhModelKind closed_kind(int n) const {
    return n == 1 ? EhModelKind::closed_form_single : EhModelKind::closed_form_multi;
  }
};

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int k = 0; k < count; ++k) g.push_back(lo * std::pow(hi / lo, k / (count - 1.0)));
  return g;
}

CriterionResult c1_oracle_equivalence(const Setup& su) {
  double worst = 0.0;
  const std::vector<double> weights4 = {1.0, 0.7, 0.45, 0.3};
  for (int n : {1, 4}) {
    std::vector<double> base = {0.0};
    for (double j : log_grid(1e-6, 0.1, 99)) base.push_back(j);
    for (double j : base) {
      std::vector<double> currents;
      for (int k = 0; k < n; ++k) {
        currents.push_back(n == 1 ? j : j * weights4[static_cast<std::size_t>(k)]);
      }
      const auto acc = solve_accurate_currents(currents, su.rx_model(n));
      const auto dc = solve_dc(su.rx_oracle(n), currents);
      worst = std::max(worst, std::abs(acc.i_eh - dc.i_eh) / std::max(std::abs(dc.i_eh), 1e-15));
    }
  }
  return {1, "oracle equivalence (accurate vs Newton DC)", worst <= 1e-9, worst, 1e-9,
          "max relative i_EH gap " + fmt(worst) + " over 200 grid points"};
}

CriterionResult c2_closed_form_fidelity(const Setup& su) {
  std::vector<double> s_grid = {0.0};
  for (double s : log_grid(1e-3, 0.1, 7)) s_grid.push_back(s);

  auto oracle_p = [&](int n, const PhotocurrentState& st, double s) {
    const auto op = solve_dc(su.rx_oracle(n), junction_currents(st, s, su.rx_oracle(n)));
    return su.rx_oracle(n).r_l * op.i_eh * op.i_eh;
  };

  double worst1 = 0.0;
  for (double mu_a : {0.0, 0.7}) {
    for (double p : {0.0, 0.01, 0.1}) {
      const auto st = su.state(1, mu_a, p);
      for (double s : s_grid) {
        const double model = closed_form_single(st, s, su.rx_model(1)).p_harv;
        worst1 = std::max(worst1, rel_gap(model, oracle_p(1, st, s)));
      }
    }
  }
  double worst4 = 0.0;
  auto run4 = [&](double mu_a, std::vector<double> powers) {
    for (double p : powers) {
      const auto st = su.state(4, mu_a, p);
      for (double s : s_grid) {
        const double model = closed_form_multi(st, s, su.rx_model(4)).p_harv;
        worst4 = std::max(worst4, rel_gap(model, oracle_p(4, st, s)));
      }
    }
  };
  run4(0.0, {0.01, 0.1});
  run4(0.7, {0.0, 0.01, 0.1});

  const double measured = std::max(worst1 / 5e-3, worst4 / 5e-2);
  return {2, "closed-form fidelity vs circuit oracle", measured <= 1.0, measured, 1.0,
          "N=1 max " + fmt(100 * worst1) + "% (limit 0.5%), N=4 max " + fmt(100 * worst4) +
              "% (limit 5%)"};
}

CriterionResult c3_single_junction_algebra(const Setup& su) {
  const CounterRng rng{su.opt.seed};
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double j = std::pow(10.0, -6.0 + 5.0 * rng.uniform_co(static_cast<std::uint64_t>(k), 0));
    const double split = rng.uniform_co(static_cast<std::uint64_t>(k), 1);
    PhotocurrentState st;
    st.j_a = {j * split};
    st.g_s = 1.0;
    const double s = j * (1.0 - split);
    const auto cf = closed_form_single(st, s, su.rx_model(1));
    const auto ap = solve_approximate(st, s, su.rx_model(1));
    worst = std::max(worst, rel_gap(cf.i_eh, ap.i_eh));
  }
  return {3, "single-junction Lambert-W algebra", worst <= 1e-10, worst, 1e-10,
          "max relative gap closed form vs numeric root " + fmt(worst)};
}

CriterionResult c4_lambert_identity(const Setup&) {
  double worst = 0.0;
  for (double x : log_grid(1e-6, 1e4, 101)) {
    const double w = lambert_w0_exp(x + std::log(x));
    worst = std::max(worst, std::abs(w - x) / x);
  }
  const double omega_err = std::abs(lambert_w0(1.0) - 0.5671432904);
  const double measured = std::max(worst / 1e-12, omega_err / 1e-9);
  return {4, "Lambert-W identity and omega constant", measured <= 1.0, measured, 1.0,
          "identity max rel " + fmt(worst) + " (limit 1e-12), |W0(1)-0.5671432904| = " +
              fmt(omega_err) + " (limit 1e-9)"};
}

CriterionResult c5_spectral_sanity(const Setup& su) {
  const PhysicalConstants pc;
  const ReceiverSpec& rx = su.rx_oracle(1);
  const AmbientModel one{1.0};
  const double pi = 3.14159265358979323846;
  const double sigma = 2.0 * std::pow(pi, 5) * std::pow(pc.k_b, 4) /
                       (15.0 * std::pow(pc.k_p, 3) * pc.c * pc.c);
  const double expected = pc.nu_s(rx.a_p) * sigma * std::pow(pc.t_sun, 4) / pi;
  const double integral = integrate(
      [&](double lam) { return ambient_psd(lam, one, rx, pc); }, 10e-9, 100e-6, {1e-10, 1e-12, 48});
  const double rel = std::abs(integral - expected) / expected;
  return {5, "black-body integral vs Stefan-Boltzmann", rel <= 5e-3, rel, 5e-3,
          "integral " + fmt(integral) + " W vs " + fmt(expected) + " W, rel " + fmt(rel)};
}

CriterionResult c6_corollary_average_power(const Setup& su) {
  double worst = 0.0;
  std::uint64_t stream_base = 0;
  for (int n : {1, 4}) {
    for (double p : {0.0, 0.1}) {
      const auto st = su.state(n, 0.0, p);
      const PharvCurve curve(su.closed_kind(n), st, su.rx_model(n));
      const double a_sq = 0.1;
      const double closed = avg_power_optimal(a_sq, curve);
      const CounterRng rng{su.opt.seed + 17 + stream_base};
      const int trials = 1000000;
      double mean = 0.0;
      for (int k = 0; k < trials; ++k) {
        const double u = rng.uniform_co(static_cast<std::uint64_t>(k), 0);
        mean += curve.pharv_s(sample_optimal(u, a_sq, curve));
      }
      mean /= trials;
      worst = std::max(worst, std::abs(mean - closed) / closed);
      ++stream_base;
    }
  }
  return {6, "Monte Carlo mean power vs closed form", worst <= 0.01, worst, 0.01,
          "max relative gap " + fmt(worst) + " over 1e6 samples x 4 configurations"};
}

CriterionResult c7_rate_consistency(const Setup& su) {
  const NoiseModel noise{1e-9};
  double worst = 0.0;
  int ordering_violations = 0;
  for (int n : {1, 4}) {
    for (double mu_a : {0.0, 0.7}) {
      for (double p : {0.0, 0.1}) {
        const auto st = su.state(n, mu_a, p);
        const PharvCurve curve(su.closed_kind(n), st, su.rx_model(n));
        for (double a_sq : log_grid(1e-4, 0.1, 8)) {
          const double r_max = max_rate(a_sq, curve, noise);
          const InputDistribution opt{DistKind::optimal_fstar, a_sq, curve};
          worst = std::max(worst, std::abs(rate_for_cdf(opt, noise) - r_max));
          const InputDistribution uni{DistKind::uniform, a_sq, curve};
          if (rate_for_cdf(uni, noise) > r_max + 1e-9) ++ordering_violations;
        }
      }
    }
  }
  const bool pass = worst <= 1e-6 && ordering_violations == 0;
  return {7, "rate consistency and optimality ordering", pass, worst, 1e-6,
          "max |R(F*) - Rbar| = " + fmt(worst) + " nats, uniform-above-optimal count " +
              std::to_string(ordering_violations)};
}

CriterionResult c8_ber_monte_carlo(const Setup& su) {
  const NoiseModel noise{1e-9};
  const auto st = su.state(1, 0.0, 0.0);
  const PharvCurve curve(su.closed_kind(1), st, su.rx_model(1));
  const std::uint64_t trials = 10000000;
  double worst = 0.0;
  std::string points;
  int idx = 0;
  for (double target : {1e-4, 1e-3, 1e-2, 0.05, 0.3}) {
    // Invert Q to a threshold z, then theta, then the transmit power A^2.
    const auto zroot = bisect([&](double z) { return q_function(z) - target; }, 0.0, 8.0,
                              0.5 - target, q_function(8.0) - target);
    const double theta_target = 2.0 * noise.sigma() * zroot.x;
    const auto aroot = bisect(
        [&](double a) { return sensitivity(a, curve).theta - theta_target; }, 0.0, 0.1,
        -theta_target, sensitivity(0.1, curve).theta - theta_target);
    const double a_sq = aroot.x;
    const double predicted = ber_analytic(a_sq, curve, noise);
    const auto mc = ber_monte_carlo(a_sq, curve, noise, trials,
                                    su.opt.seed + 1000 + static_cast<std::uint64_t>(idx),
                                    su.opt.jobs);
    const double se = std::sqrt(predicted * (1.0 - predicted) / static_cast<double>(trials));
    worst = std::max(worst, std::abs(mc.ber - predicted) / (3.0 * se));
    points += (idx ? ", " : "") + fmt(predicted);
    ++idx;
  }
  return {8, "OOK BER Monte Carlo vs analytic", worst <= 1.0, worst, 1.0,
          "max |ber_mc - Q| in 3-sigma units: " + fmt(worst) + " at BER points {" + points + "}"};
}

CriterionResult c9_transient_chain(const Setup& su) {
  const auto st = su.state(1, 0.0, 0.0);
  const double s = 0.1;
  const double t_slot = 1e-3;
  TransientOptions topt;
  topt.dt = t_slot / 1e4;
  topt.cold_start = true;
  const std::vector<double> symbols(250, s);
  const auto trace = simulate_transient(su.rx_oracle(1), st, symbols, t_slot, topt);

  const auto acc = solve_accurate(st, s, su.rx_model(1));
  const double x_expected = std::sqrt(acc.p_harv);

  const double i_gap = rel_gap(trace.slots.back().i_eh_end, acc.i_eh);

  double peak = 0.0;
  for (const auto& rec : trace.slots) peak = std::max(peak, rec.i_id_peak);
  const double settle = std::abs(trace.slots.back().i_id_end) / peak;

  double sum_r = 0.0;
  for (const auto& rec : trace.slots) sum_r += rec.r;
  const ReceiverSpec& rx = su.rx_oracle(1);
  const double y = sum_r / (rx.r_d * rx.c_d * std::sqrt(rx.r_l));
  const double y_gap = std::abs(y - x_expected) / x_expected;

  const double measured = std::max({i_gap / 1e-3, settle / 1e-3, y_gap / 1e-3});
  return {9, "transient steady state and integrate-and-dump", measured <= 1.0, measured, 1.0,
          "i_EH gap " + fmt(i_gap) + ", slot-end i_ID/peak " + fmt(settle) + ", telescoped-sum gap " +
              fmt(y_gap) + " (each limit 1e-3)"};
}

CriterionResult c10_tradeoff_frontier(const Setup& su) {
  const NoiseModel noise{1e-9};
  const double a_sq = 0.1;
  int violations = 0;
  for (int n : {1, 4}) {
    std::vector<double> p_grid = {0.0};
    for (double p : log_grid(1e-3, 0.2, 12)) p_grid.push_back(p);
    double prev_power = -1.0, prev_rate = 1e300;
    for (double p : p_grid) {
      const auto st = su.state(n, 0.0, p);
      const PharvCurve curve(su.closed_kind(n), st, su.rx_model(n));
      const double power = avg_power_optimal(a_sq, curve);
      const double rate = max_rate(a_sq, curve, noise);
      if (power < prev_power * (1.0 - 1e-12)) ++violations;
      if (rate > prev_rate * (1.0 + 1e-12) + 1e-18) ++violations;
      prev_power = power;
      prev_rate = rate;
    }
  }
  // Multi-junction dominance in harvested power under broadband ambient light.
  int dominance_failures = 0;
  for (double p : {0.0, 0.01, 0.1}) {
    const PharvCurve c1(su.closed_kind(1), su.state(1, 0.7, p), su.rx_model(1));
    const PharvCurve c4(su.closed_kind(4), su.state(4, 0.7, p), su.rx_model(4));
    if (!(avg_power_optimal(a_sq, c4) > avg_power_optimal(a_sq, c1))) ++dominance_failures;
  }
  const int total = violations + dominance_failures;
  return {10, "rate-power frontier shape and N=4 dominance", total == 0,
          static_cast<double>(total), 0.0,
          std::to_string(violations) + " monotonicity violations, " +
              std::to_string(dominance_failures) + " dominance failures"};
}

}  // namespace

std::vector<CriterionResult> run_acceptance_battery(const ValidationOptions& options) {
  const Setup su(options);
  std::vector<CriterionResult> results;
  const auto wanted = [&](int id) {
    return options.criteria.empty() ||
           std::find(options.criteria.begin(), options.criteria.end(), id) !=
               options.criteria.end();
  };
  const auto timed = [&](int id, CriterionResult (*fn)(const Setup&)) {
    if (!wanted(id)) return;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = fn(su);
    const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.detail += " [" + fmt(dt) + " s]";
    results.push_back(std::move(r));
  };
  timed(1, c1_oracle_equivalence);
  timed(2, c2_closed_form_fidelity);
  timed(3, c3_single_junction_algebra);
  timed(4, c4_lambert_identity);
  timed(5, c5_spectral_sanity);
  timed(6, c6_corollary_average_power);
  timed(7, c7_rate_consistency);
  timed(8, c8_ber_monte_carlo);
  timed(9, c9_transient_chain);
  timed(10, c10_tradeoff_frontier);
  return results;
}

Table validation_table(const std::vector<CriterionResult>& results) {
  Table t;
  t.columns = {"id", "name", "pass", "measured", "limit", "detail"};
  for (const auto& r : results) {
    t.add_row({static_cast<std::int64_t>(r.id), r.name, std::string(r.pass ? "PASS" : "FAIL"),
               r.measured, r.limit, r.detail});
  }
  return t;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace slipt
