#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slipt/config.hpp"
#include "slipt/sweeps.hpp"
#include "slipt/table.hpp"
#include "slipt/validation.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 0;
  bool jobs_given = false;
};

void attach_common(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path, "key = value configuration file");
  cmd->add_option("--set", args.sets, "override a config key, e.g. --set ambient.mu_a=0.7")
      ->take_all();
  cmd->add_option("--out", args.out, "output file (default stdout); also writes <out>.meta.json");
  cmd->add_option("--format", args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", args.seed, "seed for Monte Carlo runs")
      ->each([&args](const std::string&) { args.seed_given = true; });
  cmd->add_option("--jobs", args.jobs, "worker threads for sweeps")
      ->each([&args](const std::string&) { args.jobs_given = true; });
}

slipt::RunConfig build_config(const CliArgs& args) {
  std::map<std::string, std::string> kv;
  if (const char* env = std::getenv("SLIPT_LAB_JOBS")) kv["jobs"] = env;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw slipt::ConfigError("cannot open config file '" + args.config_path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    for (auto& [k, v] : slipt::parse_key_values(text)) kv[k] = v;
  }
  for (const std::string& set : args.sets) {
    const auto eq = set.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw slipt::ConfigError("--set expects key=value, got '" + set + "'");
    }
    kv[set.substr(0, eq)] = set.substr(eq + 1);
  }
  if (args.seed_given) kv["seed"] = std::to_string(args.seed);
  if (args.jobs_given) kv["jobs"] = std::to_string(args.jobs);
  return slipt::config_from_map(kv);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw slipt::ConfigError("cannot write '" + path + "'");
  out << text;
}

std::string render(const slipt::Table& table, const std::string& format) {
  return format == "json" ? slipt::to_json_records(table) : slipt::to_csv(table);
}

void emit(const slipt::Table& table, const nlohmann::json& metadata, const CliArgs& args) {
  const std::string body = render(table, args.format);
  if (args.out.empty()) {
    std::cout << body;
    return;
  }
  write_text(args.out, body);
  write_text(args.out + ".meta.json", metadata.dump(2) + "\n");
}

int run_command(const std::string& name, const CliArgs& args) {
  const slipt::RunConfig cfg = build_config(args);

  if (name == "validate") {
    slipt::ValidationOptions opt;
    opt.seed = cfg.seed;
    opt.jobs = cfg.jobs;
    opt.fault_rsigma_scale =
        slipt::parse_grid(slipt::extra_or(cfg, "validate.fault_rsigma_scale", "1"))[0];
    const std::string which = slipt::extra_or(cfg, "validate.criteria", "");
    if (!which.empty()) {
      for (double id : slipt::parse_grid(which)) opt.criteria.push_back(static_cast<int>(id));
    }
    const auto results = slipt::run_acceptance_battery(opt);
    for (const auto& r : results) {
      std::cout << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name
                << "  measured=" << slipt::format_double(r.measured)
                << " limit=" << slipt::format_double(r.limit) << "  " << r.detail << "\n";
    }
    if (!args.out.empty()) {
      nlohmann::json meta;
      meta["command"] = "validate";
      meta["config"] = cfg.resolved;
      meta["warnings"] = cfg.warnings;
      emit(slipt::validation_table(results), meta, args);
    }
    return slipt::all_passed(results) ? 0 : 3;
  }

  if (name == "transient") {
    const auto result = slipt::cmd_transient(cfg);
    if (args.out.empty()) {
      std::cout << render(result.slots, args.format);
    } else {
      write_text(args.out, render(result.waveform, args.format));
      const auto dot = args.out.rfind('.');
      const std::string stem = dot == std::string::npos ? args.out : args.out.substr(0, dot);
      const std::string ext = dot == std::string::npos ? "" : args.out.substr(dot);
      write_text(stem + ".slots" + ext, render(result.slots, args.format));
      write_text(args.out + ".meta.json", result.metadata.dump(2) + "\n");
    }
    return result.exit_code;
  }

  slipt::SweepResult result;
  if (name == "eh-curve") result = slipt::cmd_eh_curve(cfg);
  else if (name == "sensitivity") result = slipt::cmd_sensitivity(cfg);
  else if (name == "rate") result = slipt::cmd_rate(cfg);
  else if (name == "ber") result = slipt::cmd_ber(cfg);
  else if (name == "cdf") result = slipt::cmd_cdf(cfg);
  else if (name == "tradeoff") result = slipt::cmd_tradeoff(cfg);
  else throw slipt::ConfigError("unknown subcommand '" + name + "'");

  emit(result.table, result.metadata, args);
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "slipt-lab: photovoltaic SLIPT receiver models, circuit oracle, and "
      "information-rate analysis"};
  app.require_subcommand(1);
  app.footer("Config keys (file or --set):\n" + slipt::config_key_reference());

  CliArgs args;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"eh-curve", "harvested power vs transmit power for all models and the circuit oracle"},
      {"sensitivity", "receiver sensitivity theta(A^2) over ambient/energy grids"},
      {"rate", "achievable rates for the optimal and uniform input distributions"},
      {"ber", "analytic and Monte Carlo OOK bit-error rates"},
      {"cdf", "rate-maximizing input cdf F*_s vs the uniform cdf"},
      {"tradeoff", "rate vs average harvested power over the energy-signal power grid"},
      {"transient", "time-domain simulation of the receiver filter network"},
      {"validate", "run the full acceptance battery (exit 3 on any failure)"},
  };
  std::string chosen;
  for (const auto& [name, desc] : commands) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    attach_common(cmd, args);
    cmd->callback([&chosen, name = name] { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return run_command(chosen, args);
  } catch (const slipt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const slipt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
