#include "slipt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "slipt/table.hpp"

namespace slipt {

namespace {

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = value.data() + value.size();
  const auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError("config: key '" + key + "' has a non-numeric value '" + value + "'");
  }
  return out;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    throw ConfigError("config: key '" + key + "' has a non-integer value '" + value + "'");
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

/// Re-emit a numeric value in canonical shortest form so the resolved map is
/// stable under parse/serialize cycles.
std::string canonical_value(const std::string& key, const std::string& value) {
  if (key == "model" || key == "receiver.r0_override_a_per_w" || starts_with(key, "sweep.") ||
      starts_with(key, "transient.") || starts_with(key, "validate.")) {
    return value;  // enumerations, optional markers, and grid specs stay verbatim
  }
  if (key == "receiver.n" || key == "receiver.info_junction" || key == "seed" ||
      key == "jobs" || key == "mc.trials") {
    return std::to_string(parse_int(key, value));
  }
  return format_double(parse_double(key, value));
}

const std::vector<std::string> kJunctionFields = {
    "lambda_min_nm", "lambda_max_nm", "eta", "i_sat1_a", "i_sat2_a", "r_sh_ohm", "r_s_ohm"};
const std::vector<std::string> kLineFields = {"lambda_nm", "power_mw", "gain"};

bool known_scalar_key(const std::string& key) {
  static const std::vector<std::string> keys = {
      "receiver.n", "receiver.r_l_ohm", "receiver.r_d_ohm", "receiver.c_d_f", "receiver.l_h",
      "receiver.v_t_v", "receiver.a_p_cm2", "receiver.info_junction",
      "receiver.r0_override_a_per_w", "ambient.mu_a", "energy.total_power_mw",
      "info.lambda0_nm", "info.h", "info.a_sq_mw", "info.t_s", "noise.sigma_sq", "model",
      "seed", "jobs", "mc.trials"};
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

/// receiver.junctionK.field -> (K, field); returns 0 on mismatch.
int indexed_key(const std::string& key, const char* prefix, const std::vector<std::string>& fields,
                std::string* field_out) {
  const std::string p(prefix);
  if (!starts_with(key, p.c_str())) return 0;
  const auto dot = key.find('.', p.size());
  if (dot == std::string::npos) return 0;
  const std::string idx_str = key.substr(p.size(), dot - p.size());
  const std::string field = key.substr(dot + 1);
  if (std::find(fields.begin(), fields.end(), field) == fields.end()) return 0;
  int idx = 0;
  const auto res = std::from_chars(idx_str.data(), idx_str.data() + idx_str.size(), idx);
  if (res.ec != std::errc{} || res.ptr != idx_str.data() + idx_str.size() || idx < 1) return 0;
  if (field_out) *field_out = field;
  return idx;
}

void validate_key(const std::string& key) {
  if (known_scalar_key(key)) return;
  if (indexed_key(key, "receiver.junction", kJunctionFields, nullptr) > 0) return;
  if (indexed_key(key, "energy.line", kLineFields, nullptr) > 0) return;
  if (starts_with(key, "sweep.") || starts_with(key, "transient.") || starts_with(key, "validate.")) {
    return;
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

std::map<std::string, std::string> default_key_map(int n) {
  if (n < 1) throw ConfigError("config: receiver.n must be >= 1");
  std::map<std::string, std::string> kv;
  kv["receiver.n"] = std::to_string(n);
  kv["receiver.r_l_ohm"] = format_double(1e4);
  kv["receiver.r_d_ohm"] = format_double(1e4);
  kv["receiver.c_d_f"] = format_double(2.5e-6);
  kv["receiver.l_h"] = format_double(1e-2);
  kv["receiver.v_t_v"] = format_double(0.025851999786435893);
  kv["receiver.a_p_cm2"] = format_double(1.0);
  kv["receiver.r0_override_a_per_w"] = "none";

  std::vector<std::pair<double, double>> bands_nm;
  if (n == 1) {
    // The single visible-band cell would not absorb the 980 nm carrier, so the
    // default passband extends to 1000 nm (recorded as a warning downstream).
    bands_nm.push_back({400.0, 1000.0});
  } else if (n == 4) {
    bands_nm = {{400.0, 650.0}, {650.0, 900.0}, {900.0, 1100.0}, {1100.0, 1800.0}};
  } else {
    // Equal split of the 400-1800 nm range.
    const double width = (1800.0 - 400.0) / n;
    for (int k = 0; k < n; ++k) bands_nm.push_back({400.0 + k * width, 400.0 + (k + 1) * width});
  }
  for (int k = 0; k < n; ++k) {
    const std::string p = "receiver.junction" + std::to_string(k + 1) + ".";
    kv[p + "lambda_min_nm"] = format_double(bands_nm[static_cast<std::size_t>(k)].first);
    kv[p + "lambda_max_nm"] = format_double(bands_nm[static_cast<std::size_t>(k)].second);
    kv[p + "eta"] = format_double(0.7);
    kv[p + "i_sat1_a"] = format_double(1e-9);
    kv[p + "i_sat2_a"] = format_double(1e-9);
    kv[p + "r_sh_ohm"] = format_double(1e8);
    kv[p + "r_s_ohm"] = format_double(100.0);
  }

  kv["ambient.mu_a"] = format_double(0.0);
  kv["energy.total_power_mw"] = format_double(0.0);
  kv["info.lambda0_nm"] = format_double(980.0);
  kv["info.h"] = format_double(1.0);
  kv["info.a_sq_mw"] = format_double(100.0);
  kv["info.t_s"] = format_double(1e-3);
  kv["noise.sigma_sq"] = format_double(1e-9);
  kv["model"] = "auto";
  kv["seed"] = "1";
  kv["jobs"] = "1";
  kv["mc.trials"] = "1000000";
  return kv;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config: line " + std::to_string(line_no) + " has an empty key or value");
    }
    kv[key] = value;
  }
  return kv;
}

RunConfig config_from_map(const std::map<std::string, std::string>& user) {
  for (const auto& [key, value] : user) {
    validate_key(key);
    (void)value;
  }

  int n = 1;
  if (const auto it = user.find("receiver.n"); it != user.end()) {
    n = static_cast<int>(parse_int("receiver.n", it->second));
  }
  int max_line = 0;
  for (const auto& [key, value] : user) {
    (void)value;
    std::string field;
    if (const int idx = indexed_key(key, "receiver.junction", kJunctionFields, &field); idx > 0) {
      if (idx > n) {
        throw ConfigError("config: '" + key + "' refers past receiver.n = " + std::to_string(n));
      }
    }
    if (const int idx = indexed_key(key, "energy.line", kLineFields, &field); idx > 0) {
      max_line = std::max(max_line, idx);
    }
  }

  std::map<std::string, std::string> kv = default_key_map(n);
  const bool user_lines =
      std::any_of(user.begin(), user.end(),
                  [](const auto& e) { return starts_with(e.first, "energy.line"); });
  for (const auto& [key, value] : user) kv[key] = canonical_value(key, value);

  RunConfig cfg;
  cfg.receiver.junctions.clear();
  for (int k = 1; k <= n; ++k) {
    const std::string p = "receiver.junction" + std::to_string(k) + ".";
    JunctionSpec jn;
    jn.band.lambda_min = parse_double(p + "lambda_min_nm", kv.at(p + "lambda_min_nm")) * 1e-9;
    jn.band.lambda_max = parse_double(p + "lambda_max_nm", kv.at(p + "lambda_max_nm")) * 1e-9;
    jn.eta = parse_double(p + "eta", kv.at(p + "eta"));
    jn.i_sat1 = parse_double(p + "i_sat1_a", kv.at(p + "i_sat1_a"));
    jn.i_sat2 = parse_double(p + "i_sat2_a", kv.at(p + "i_sat2_a"));
    jn.r_sh = parse_double(p + "r_sh_ohm", kv.at(p + "r_sh_ohm"));
    jn.r_s = parse_double(p + "r_s_ohm", kv.at(p + "r_s_ohm"));
    cfg.receiver.junctions.push_back(jn);
  }
  cfg.receiver.r_l = parse_double("receiver.r_l_ohm", kv.at("receiver.r_l_ohm"));
  cfg.receiver.r_d = parse_double("receiver.r_d_ohm", kv.at("receiver.r_d_ohm"));
  cfg.receiver.c_d = parse_double("receiver.c_d_f", kv.at("receiver.c_d_f"));
  cfg.receiver.l = parse_double("receiver.l_h", kv.at("receiver.l_h"));
  cfg.receiver.v_t = parse_double("receiver.v_t_v", kv.at("receiver.v_t_v"));
  cfg.receiver.a_p = parse_double("receiver.a_p_cm2", kv.at("receiver.a_p_cm2")) * 1e-4;
  if (const std::string ov = kv.at("receiver.r0_override_a_per_w"); ov != "none") {
    cfg.receiver.r0_override = parse_double("receiver.r0_override_a_per_w", ov);
  }

  cfg.info.lambda0 = parse_double("info.lambda0_nm", kv.at("info.lambda0_nm")) * 1e-9;
  cfg.info.h = parse_double("info.h", kv.at("info.h"));
  cfg.info.a_sq = parse_double("info.a_sq_mw", kv.at("info.a_sq_mw")) * 1e-3;
  cfg.info.t = parse_double("info.t_s", kv.at("info.t_s"));

  // info_junction: explicit key wins; otherwise the junction covering the
  // carrier wavelength, resolved into the canonical map.
  if (kv.count("receiver.info_junction")) {
    const int idx = static_cast<int>(
        parse_int("receiver.info_junction", kv.at("receiver.info_junction")));
    if (idx < 1 || idx > n) throw ConfigError("config: receiver.info_junction out of range");
    cfg.receiver.info_junction = idx - 1;
  } else {
    int covering = 0;
    for (int k = 0; k < n; ++k) {
      if (cfg.receiver.junctions[static_cast<std::size_t>(k)].band.contains(cfg.info.lambda0)) {
        covering = k;
        break;
      }
    }
    cfg.receiver.info_junction = covering;
    kv["receiver.info_junction"] = std::to_string(covering + 1);
  }

  cfg.ambient.mu_a = parse_double("ambient.mu_a", kv.at("ambient.mu_a"));
  cfg.energy_total_power = parse_double("energy.total_power_mw", kv.at("energy.total_power_mw")) * 1e-3;
  cfg.explicit_lines = user_lines;
  if (user_lines) {
    for (int k = 1;; ++k) {
      const std::string p = "energy.line" + std::to_string(k) + ".";
      if (!kv.count(p + "lambda_nm")) break;
      EnergySignal::Line line;
      line.lambda = parse_double(p + "lambda_nm", kv.at(p + "lambda_nm")) * 1e-9;
      line.power = kv.count(p + "power_mw") ? parse_double(p + "power_mw", kv.at(p + "power_mw")) * 1e-3 : 0.0;
      line.gain = kv.count(p + "gain") ? parse_double(p + "gain", kv.at(p + "gain")) : 1.0;
      cfg.energy.lines.push_back(line);
    }
    if (static_cast<int>(cfg.energy.lines.size()) != max_line) {
      throw ConfigError("config: energy.lineK.lambda_nm keys must be contiguous from K = 1");
    }
  } else {
    // Auto lines: one per junction at the band midpoint, equal power split.
    const double per_line = cfg.energy_total_power / n;
    for (const auto& jn : cfg.receiver.junctions) {
      cfg.energy.lines.push_back({jn.band.midpoint(), per_line, 1.0});
    }
  }

  cfg.noise.sigma_sq = parse_double("noise.sigma_sq", kv.at("noise.sigma_sq"));

  const std::string model_name = kv.at("model");
  if (model_name == "auto") {
    cfg.model = (n == 1) ? EhModelKind::closed_form_single : EhModelKind::closed_form_multi;
    kv["model"] = to_string(cfg.model);
  } else {
    cfg.model = eh_model_from_string(model_name);
  }

  cfg.seed = static_cast<std::uint64_t>(parse_int("seed", kv.at("seed")));
  cfg.jobs = static_cast<int>(parse_int("jobs", kv.at("jobs")));
  cfg.mc_trials = static_cast<std::uint64_t>(parse_int("mc.trials", kv.at("mc.trials")));
  if (cfg.jobs < 1) throw ConfigError("config: jobs must be >= 1");

  for (const auto& [key, value] : kv) {
    if (starts_with(key, "sweep.") || starts_with(key, "transient.") ||
        starts_with(key, "validate.")) {
      cfg.extras[key] = value;
    }
  }

  // Default-deviation warnings surfaced in run metadata.
  if (n == 1 && kv.at("receiver.junction1.lambda_min_nm") == format_double(400.0) &&
      kv.at("receiver.junction1.lambda_max_nm") == format_double(1000.0)) {
    cfg.warnings.push_back(
        "n=1 default extends the junction passband to 400-1000 nm so the 980 nm carrier is "
        "absorbed; set receiver.junction1.lambda_max_nm to restore a visible-only cell");
  }
  if (cfg.receiver.r0_override) {
    cfg.warnings.push_back("responsivity at the carrier wavelength is overridden");
  }

  cfg.receiver.validate();
  cfg.energy.validate();
  cfg.info.validate();
  cfg.noise.validate();
  cfg.resolved = kv;
  return cfg;
}

RunConfig default_config(int n_junctions) {
  return config_from_map({{"receiver.n", std::to_string(n_junctions)}});
}

std::map<std::string, std::string> config_to_map(const RunConfig& config) { return config.resolved; }

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, value] : config.resolved) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
      if (c == ':') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    if (parts.size() != 3 && parts.size() != 4) {
      throw ConfigError("grid '" + spec + "': expected lo:hi:count[:log|:lin]");
    }
    const double lo = parse_double("grid", parts[0]);
    const double hi = parse_double("grid", parts[1]);
    const std::int64_t count = parse_int("grid", parts[2]);
    const bool log_scale = parts.size() == 4 && parts[3] == "log";
    if (parts.size() == 4 && parts[3] != "log" && parts[3] != "lin") {
      throw ConfigError("grid '" + spec + "': scale must be log or lin");
    }
    if (count < 1) throw ConfigError("grid '" + spec + "': count must be >= 1");
    if (count == 1) return {lo};
    if (log_scale && (lo <= 0.0 || hi <= 0.0)) {
      throw ConfigError("grid '" + spec + "': log scale needs positive bounds");
    }
    for (std::int64_t k = 0; k < count; ++k) {
      const double f = static_cast<double>(k) / static_cast<double>(count - 1);
      grid.push_back(log_scale ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo));
    }
    return grid;
  }
  std::string cur;
  for (char c : spec) {
    if (c == ',') {
      grid.push_back(parse_double("grid", trim(cur)));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) grid.push_back(parse_double("grid", trim(cur)));
  if (grid.empty()) throw ConfigError("grid '" + spec + "': empty");
  return grid;
}

std::string extra_or(const RunConfig& config, const std::string& key, const std::string& fallback) {
  const auto it = config.extras.find(key);
  return it == config.extras.end() ? fallback : it->second;
}

std::string config_key_reference() {
  return
      "receiver.n                      junction count (defaults: 1 or 4 use the reference bands)\n"
      "receiver.r_l_ohm                EH load resistance, Ohm [10000]\n"
      "receiver.r_d_ohm                information load resistance, Ohm [10000]\n"
      "receiver.c_d_f                  high-pass capacitance, F [2.5e-6]\n"
      "receiver.l_h                    low-pass inductance, H [0.01]\n"
      "receiver.v_t_v                  thermal voltage, V [kT/q at 300 K]\n"
      "receiver.a_p_cm2                cell area, cm^2 [1]\n"
      "receiver.info_junction          1-based junction receiving the carrier [auto]\n"
      "receiver.r0_override_a_per_w    carrier responsivity override, A/W, or 'none'\n"
      "receiver.junctionK.lambda_min_nm / lambda_max_nm / eta / i_sat1_a / i_sat2_a /\n"
      "                   r_sh_ohm / r_s_ohm   per-junction electrical/optical parameters\n"
      "ambient.mu_a                    ambient intensity coefficient [0]\n"
      "energy.total_power_mw           energy-signal power p, split over band midpoints [0]\n"
      "energy.lineK.lambda_nm / power_mw / gain   explicit laser lines (override the split)\n"
      "info.lambda0_nm                 carrier wavelength [980]\n"
      "info.h                          information channel gain [1]\n"
      "info.a_sq_mw                    maximum transmit power A^2, mW [100]\n"
      "info.t_s                        symbol period, s [1e-3]\n"
      "noise.sigma_sq                  normalized output noise variance [1e-9]\n"
      "model                           accurate|approximate|closed_single|closed_multi|\n"
      "                                baseline_single_diode|baseline_mpp|auto\n"
      "seed / jobs / mc.trials         RNG seed, worker count, Monte Carlo trials\n"
      "sweep.s_mw, sweep.a_sq_mw, sweep.p_mw, sweep.mu_a, sweep.cdf_points\n"
      "                                sweep grids: 'a,b,c' or 'lo:hi:count[:log]'\n"
      "transient.slots / s_mw / pattern(constant|step|ook) / dt_steps / start(cold|warm)\n"
      "validate.fault_rsigma_scale     fault-injection scale on model-side series resistance\n"
      "validate.criteria               comma list of criterion ids to run (default: all)\n";
}

}  // namespace slipt
