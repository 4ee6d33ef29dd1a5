#include "slipt/sweeps.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

#include "slipt/circuitsim.hpp"
#include "slipt/infotheory.hpp"
#include "slipt/rng.hpp"

namespace slipt {

namespace {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n) return;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
  pool.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

nlohmann::json base_metadata(const RunConfig& cfg, const std::string& command, const Table& table) {
  nlohmann::json meta;
  meta["command"] = command;
  meta["columns"] = table.columns;
  meta["config"] = cfg.resolved;
  meta["warnings"] = cfg.warnings;
  meta["notes"] = nlohmann::json::array();
  return meta;
}

/// Default figure-range grids: {0} followed by a log sweep up to `hi_mw`.
std::vector<double> zero_plus_log_grid_mw(double hi_mw, int points) {
  std::vector<double> g = {0.0};
  const double lo = 1e-3;
  for (int k = 0; k < points; ++k) {
    g.push_back(lo * std::pow(hi_mw / lo, static_cast<double>(k) / (points - 1)));
  }
  return g;
}

std::vector<double> grid_from_extra(const RunConfig& cfg, const std::string& key,
                                    std::vector<double> fallback, double unit) {
  const auto it = cfg.extras.find(key);
  std::vector<double> g = (it == cfg.extras.end()) ? std::move(fallback) : parse_grid(it->second);
  for (double& v : g) v *= unit;
  return g;
}

/// Energy signal for a swept total power p: the configured lines when p
/// matches the configured total, otherwise an equal split over the band
/// midpoints.
EnergySignal energy_for_power(const RunConfig& cfg, double p) {
  if (cfg.explicit_lines && p == cfg.energy_total_power) return cfg.energy;
  EnergySignal energy;
  const double per_line = p / cfg.receiver.n();
  for (const auto& jn : cfg.receiver.junctions) {
    energy.lines.push_back({jn.band.midpoint(), per_line, 1.0});
  }
  return energy;
}

PhotocurrentState state_for(const RunConfig& cfg, double mu_a, double p) {
  return photocurrents(cfg.receiver, AmbientModel{mu_a}, energy_for_power(cfg, p), cfg.info);
}

PharvCurve curve_for(const RunConfig& cfg, const PhotocurrentState& state) {
  return PharvCurve(cfg.model, state, cfg.receiver);
}

}  // namespace

SweepResult cmd_eh_curve(const RunConfig& cfg) {
  const std::vector<double> mu_grid = grid_from_extra(cfg, "sweep.mu_a", {0.0, 0.7}, 1.0);
  const std::vector<double> p_grid = grid_from_extra(cfg, "sweep.p_mw", {0.0, 10.0, 100.0}, 1e-3);
  const std::vector<double> s_grid =
      grid_from_extra(cfg, "sweep.s_mw", zero_plus_log_grid_mw(100.0, 13), 1e-3);

  const std::vector<EhModelKind> models = {
      EhModelKind::accurate,           EhModelKind::approximate,
      EhModelKind::closed_form_single, EhModelKind::closed_form_multi,
      EhModelKind::baseline_single_diode, EhModelKind::baseline_mpp};

  SweepResult out;
  out.table.columns = {"n", "mu_a", "p_w", "s_w", "model", "p_harv_w", "status"};

  struct Point {
    double mu_a, p, s;
    const PhotocurrentState* state;
    std::string model;
  };
  std::vector<PhotocurrentState> states;
  states.reserve(mu_grid.size() * p_grid.size());
  std::vector<Point> points;
  for (double mu_a : mu_grid) {
    for (double p : p_grid) {
      states.push_back(state_for(cfg, mu_a, p));
      for (double s : s_grid) {
        for (EhModelKind kind : models) points.push_back({mu_a, p, s, &states.back(), to_string(kind)});
        points.push_back({mu_a, p, s, &states.back(), "oracle_dc"});
      }
    }
  }

  std::vector<std::vector<Cell>> rows(points.size());
  std::atomic<std::size_t> failures{0};
  parallel_for(points.size(), cfg.jobs, [&](std::size_t k) {
    const Point& pt = points[k];
    Cell p_harv{std::string("")};
    std::string status = "ok";
    try {
      if (pt.model == "oracle_dc") {
        const auto op = solve_dc(cfg.receiver, junction_currents(*pt.state, pt.s, cfg.receiver));
        p_harv = cfg.receiver.r_l * op.i_eh * op.i_eh;
      } else {
        p_harv = eval_eh_model(eh_model_from_string(pt.model), *pt.state, pt.s, cfg.receiver).p_harv;
      }
    } catch (const Error& e) {
      status = std::string("error: ") + e.what();
      failures.fetch_add(1);
    }
    rows[k] = {static_cast<std::int64_t>(cfg.receiver.n()), pt.mu_a, pt.p, pt.s, pt.model,
               p_harv, status};
  });
  for (auto& row : rows) out.table.rows.push_back(std::move(row));

  out.metadata = base_metadata(cfg, "eh-curve", out.table);
  if (failures.load() == points.size()) out.exit_code = 2;
  return out;
}

SweepResult cmd_sensitivity(const RunConfig& cfg) {
  const std::vector<double> a_grid =
      grid_from_extra(cfg, "sweep.a_sq_mw", zero_plus_log_grid_mw(100.0, 13), 1e-3);
  const std::vector<double> mu_grid = grid_from_extra(cfg, "sweep.mu_a", {0.0, 0.7}, 1.0);
  const std::vector<double> p_grid = grid_from_extra(cfg, "sweep.p_mw", {0.0, 10.0, 100.0}, 1e-3);

  SweepResult out;
  out.table.columns = {"a_sq_w", "mu_a", "p_w", "theta", "x0", "xa"};
  for (double mu_a : mu_grid) {
    for (double p : p_grid) {
      const PharvCurve curve = curve_for(cfg, state_for(cfg, mu_a, p));
      std::vector<std::vector<Cell>> rows(a_grid.size());
      parallel_for(a_grid.size(), cfg.jobs, [&](std::size_t k) {
        const auto sens = sensitivity(a_grid[k], curve);
        rows[k] = {a_grid[k], mu_a, p, sens.theta, sens.x0, sens.x_a};
      });
      for (auto& row : rows) out.table.rows.push_back(std::move(row));
    }
  }
  out.metadata = base_metadata(cfg, "sensitivity", out.table);
  return out;
}

SweepResult cmd_rate(const RunConfig& cfg) {
  const std::vector<double> a_grid =
      grid_from_extra(cfg, "sweep.a_sq_mw", zero_plus_log_grid_mw(100.0, 13), 1e-3);

  SweepResult out;
  out.table.columns = {"a_sq_w", "mu_a", "p_w", "dist", "rate_nats"};
  const PharvCurve curve = curve_for(cfg, state_for(cfg, cfg.ambient.mu_a, cfg.energy_total_power));

  std::vector<std::vector<Cell>> opt_rows(a_grid.size()), uni_rows(a_grid.size());
  parallel_for(a_grid.size(), cfg.jobs, [&](std::size_t k) {
    const double a_sq = a_grid[k];
    const double r_opt = max_rate(a_sq, curve, cfg.noise);
    const InputDistribution uni{DistKind::uniform, a_sq, curve};
    const double r_uni = a_sq > 0.0 ? rate_for_cdf(uni, cfg.noise) : 0.0;
    opt_rows[k] = {a_sq, cfg.ambient.mu_a, cfg.energy_total_power, "optimal_fstar", r_opt};
    uni_rows[k] = {a_sq, cfg.ambient.mu_a, cfg.energy_total_power, "uniform", r_uni};
  });
  for (std::size_t k = 0; k < a_grid.size(); ++k) {
    out.table.rows.push_back(std::move(opt_rows[k]));
    out.table.rows.push_back(std::move(uni_rows[k]));
  }
  out.metadata = base_metadata(cfg, "rate", out.table);
  out.metadata["notes"].push_back("rates are entropy-power-inequality lower bounds, nats per channel use");
  return out;
}

SweepResult cmd_ber(const RunConfig& cfg) {
  std::vector<double> default_a;
  for (int k = 0; k < 25; ++k) default_a.push_back(1e-4 * std::pow(1e6, k / 24.0));
  const std::vector<double> a_grid = grid_from_extra(cfg, "sweep.a_sq_mw", default_a, 1e-3);
  const std::vector<double> mu_grid = grid_from_extra(cfg, "sweep.mu_a", {0.0, 0.2, 0.7}, 1.0);

  SweepResult out;
  out.table.columns = {"a_sq_w", "mu_a", "ber_analytic", "ber_mc", "ci_halfwidth_95"};
  for (double mu_a : mu_grid) {
    const PharvCurve curve = curve_for(cfg, state_for(cfg, mu_a, cfg.energy_total_power));
    std::vector<std::vector<Cell>> rows(a_grid.size());
    // Monte Carlo inside each row is already partition-stable; rows run in
    // sequence so every row uses the same worker pool.
    for (std::size_t k = 0; k < a_grid.size(); ++k) {
      const double a_sq = a_grid[k];
      const double analytic = ber_analytic(a_sq, curve, cfg.noise);
      const auto mc = ber_monte_carlo(a_sq, curve, cfg.noise, cfg.mc_trials,
                                      cfg.seed + static_cast<std::uint64_t>(k) * 1000003ULL +
                                          static_cast<std::uint64_t>(mu_a * 1e6),
                                      cfg.jobs);
      rows[k] = {a_sq, mu_a, analytic, mc.ber, mc.ci_halfwidth_95};
    }
    for (auto& row : rows) out.table.rows.push_back(std::move(row));
  }
  out.metadata = base_metadata(cfg, "ber", out.table);
  return out;
}

SweepResult cmd_cdf(const RunConfig& cfg) {
  const int points = static_cast<int>(parse_grid(extra_or(cfg, "sweep.cdf_points", "101"))[0]);
  if (points < 2) throw ConfigError("cdf: sweep.cdf_points must be >= 2");
  const double a_sq = cfg.info.a_sq;
  const PharvCurve curve = curve_for(cfg, state_for(cfg, cfg.ambient.mu_a, cfg.energy_total_power));

  SweepResult out;
  out.table.columns = {"s_w", "f_star", "f_uniform"};
  for (int k = 0; k < points; ++k) {
    const double s = a_sq * k / (points - 1);
    out.table.add_row({s, optimal_cdf(s, a_sq, curve), a_sq > 0.0 ? s / a_sq : 1.0});
  }
  out.metadata = base_metadata(cfg, "cdf", out.table);
  return out;
}

SweepResult cmd_tradeoff(const RunConfig& cfg) {
  const std::vector<double> p_grid =
      grid_from_extra(cfg, "sweep.p_mw", zero_plus_log_grid_mw(200.0, 13), 1e-3);
  const std::vector<double> a_grid = grid_from_extra(cfg, "sweep.a_sq_mw", {100.0}, 1e-3);
  if (p_grid.empty()) throw ConfigError("tradeoff: empty p grid");

  SweepResult out;
  out.table.columns = {"a_sq_w", "p_w", "dist", "rate_nats", "avg_power_w"};
  out.metadata = base_metadata(cfg, "tradeoff", out.table);
  out.metadata["notes"].push_back("rates are entropy-power-inequality lower bounds, nats per channel use");

  for (double a_sq : a_grid) {
    std::vector<double> opt_rate(p_grid.size()), opt_power(p_grid.size());
    std::vector<std::vector<Cell>> opt_rows(p_grid.size()), uni_rows(p_grid.size());
    parallel_for(p_grid.size(), cfg.jobs, [&](std::size_t k) {
      const double p = p_grid[k];
      const PharvCurve curve = curve_for(cfg, state_for(cfg, cfg.ambient.mu_a, p));
      const auto sens = sensitivity(a_sq, curve);
      double r_opt = 0.0, pw_opt = sens.x0 * sens.x0;
      double r_uni = 0.0, pw_uni = sens.x0 * sens.x0;
      if (sens.theta > 0.0) {
        r_opt = max_rate(a_sq, curve, cfg.noise);
        pw_opt = avg_power_optimal(a_sq, curve);
        const InputDistribution uni{DistKind::uniform, a_sq, curve};
        r_uni = rate_for_cdf(uni, cfg.noise);
        pw_uni = avg_power_for_cdf(uni);
      }
      opt_rate[k] = r_opt;
      opt_power[k] = pw_opt;
      opt_rows[k] = {a_sq, p, "optimal_fstar", r_opt, pw_opt};
      uni_rows[k] = {a_sq, p, "uniform", r_uni, pw_uni};
    });
    for (std::size_t k = 0; k < p_grid.size(); ++k) {
      out.table.rows.push_back(std::move(opt_rows[k]));
      out.table.rows.push_back(std::move(uni_rows[k]));
    }
    // Frontier shape along increasing p (grid assumed sorted for this check).
    for (std::size_t k = 1; k < p_grid.size(); ++k) {
      if (p_grid[k] < p_grid[k - 1]) break;
      if (opt_power[k] < opt_power[k - 1] * (1.0 - 1e-12) ||
          opt_rate[k] > opt_rate[k - 1] * (1.0 + 1e-12) + 1e-15) {
        out.metadata["notes"].push_back("frontier monotonicity violated at p index " +
                                        std::to_string(k));
      }
    }
  }
  return out;
}

TransientResult cmd_transient(const RunConfig& cfg) {
  const int slots = static_cast<int>(parse_grid(extra_or(cfg, "transient.slots", "20"))[0]);
  const double s_level = parse_grid(extra_or(cfg, "transient.s_mw", "100"))[0] * 1e-3;
  const int dt_steps = static_cast<int>(parse_grid(extra_or(cfg, "transient.dt_steps", "10000"))[0]);
  const std::string pattern = extra_or(cfg, "transient.pattern", "ook");
  const std::string start = extra_or(cfg, "transient.start", "warm");
  if (slots < 1) throw ConfigError("transient: need at least one slot");

  std::vector<double> symbols(static_cast<std::size_t>(slots), s_level);
  if (pattern == "step") {
    for (int k = 0; k < slots / 2; ++k) symbols[static_cast<std::size_t>(k)] = 0.0;
  } else if (pattern == "ook") {
    const CounterRng rng{cfg.seed};
    for (int k = 0; k < slots; ++k) {
      symbols[static_cast<std::size_t>(k)] =
          rng.uniform_co(static_cast<std::uint64_t>(k), 0) < 0.5 ? 0.0 : s_level;
    }
  } else if (pattern != "constant") {
    throw ConfigError("transient: pattern must be constant|step|ook");
  }

  const PhotocurrentState state = state_for(cfg, cfg.ambient.mu_a, cfg.energy_total_power);
  TransientOptions opt;
  opt.dt = cfg.info.t / dt_steps;
  opt.cold_start = (start == "cold");
  if (start != "cold" && start != "warm") throw ConfigError("transient: start must be cold|warm");
  const TransientTrace trace = simulate_transient(cfg.receiver, state, symbols, cfg.info.t, opt);

  TransientResult out;
  out.waveform.columns = {"t_s", "i_out_a", "i_eh_a", "i_id_a", "v_c_v"};
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    out.waveform.add_row({trace.t[k], trace.i_out[k], trace.i_eh[k], trace.i_id[k], trace.v_c[k]});
  }
  out.slots.columns = {"k", "s_w", "r_vs", "i_id_end_a", "i_id_peak_a", "i_eh_end_a", "v_c_end_v"};
  for (std::size_t k = 0; k < trace.slots.size(); ++k) {
    const SlotRecord& rec = trace.slots[k];
    out.slots.add_row({static_cast<std::int64_t>(k), symbols[k], rec.r, rec.i_id_end,
                       rec.i_id_peak, rec.i_eh_end, rec.v_c_end});
  }
  out.metadata = base_metadata(cfg, "transient", out.waveform);
  out.metadata["slot_columns"] = out.slots.columns;
  out.metadata["mean_eh_power_last_half_w"] = trace.mean_eh_power_last_half;
  return out;
}

}  // namespace slipt
