#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "slipt/ehmodel.hpp"
#include "slipt/infotheory.hpp"
#include "slipt/spectral.hpp"

namespace slipt {

/// Fully resolved run description.  Built from defaults plus a flat
/// key-value config file and/or repeated `--set key=value` overrides.
struct RunConfig {
  ReceiverSpec receiver;
  AmbientModel ambient;
  EnergySignal energy;
  InfoSignal info;
  NoiseModel noise;
  EhModelKind model = EhModelKind::closed_form_single;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::uint64_t mc_trials = 1000000;
  double energy_total_power = 0.0;     ///< p, W; drives the auto-generated lines
  bool explicit_lines = false;         ///< energy.lineK.* keys supplied
  std::map<std::string, std::string> extras;  ///< sweep.*, transient.*, validate.*
  std::vector<std::string> warnings;   ///< default deviations, surfaced in metadata

  /// Canonical key-value form (display units, shortest-round-trip numbers).
  /// Serialization emits exactly this map, which makes serialize(parse(.))
  /// idempotent byte for byte.
  std::map<std::string, std::string> resolved;
};

/// Table-default receiver for n junctions.  n = 1 extends the single passband
/// to 400-1000 nm so the 980 nm carrier is absorbed (recorded as a warning);
/// n = 4 uses the 400/650/900/1100/1800 nm splitter bands.
RunConfig default_config(int n_junctions = 1);

/// Parse "key = value" lines ('#' comments, blank lines ignored).
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Build a config from a key map layered over the defaults for receiver.n.
RunConfig config_from_map(const std::map<std::string, std::string>& kv);

/// Fully resolved key map; config_from_map(config_to_map(c)) reproduces c.
std::map<std::string, std::string> config_to_map(const RunConfig& config);

std::string serialize_config(const RunConfig& config);

/// Grid syntax: "a,b,c" or "lo:hi:count[:log|:lin]".  Values are in the key's
/// documented unit; callers convert.
std::vector<double> parse_grid(const std::string& spec);

/// extras lookup with default.
std::string extra_or(const RunConfig& config, const std::string& key, const std::string& fallback);

/// One-line documentation of every accepted key (for --help and the README).
std::string config_key_reference();

}  // namespace slipt
