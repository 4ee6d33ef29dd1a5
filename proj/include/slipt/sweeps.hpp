#pragma once

#include <json.hpp>

#include "slipt/config.hpp"
#include "slipt/table.hpp"

namespace slipt {

/// Table plus its metadata sidecar; exit_code follows the CLI contract
/// (0 ok, 1 config error, 2 solver error, 3 validation failure).
struct SweepResult {
  Table table;
  nlohmann::json metadata;
  int exit_code = 0;
};

/// Harvested power vs transmit power for every requested model, the two
/// baselines, and the circuit-simulator oracle.  Model/receiver mismatches
/// become per-row error entries.
SweepResult cmd_eh_curve(const RunConfig& config);

/// Receiver sensitivity theta(A^2) over (A^2, mu_a, p) grids.
SweepResult cmd_sensitivity(const RunConfig& config);

/// Achievable rates for the optimal and uniform input distributions.
SweepResult cmd_rate(const RunConfig& config);

/// Analytic and Monte Carlo OOK bit-error rates.
SweepResult cmd_ber(const RunConfig& config);

/// The rate-maximizing cdf F*_s against the uniform cdf.
SweepResult cmd_cdf(const RunConfig& config);

/// Rate-power pairs over the energy-signal power grid.
SweepResult cmd_tradeoff(const RunConfig& config);

struct TransientResult {
  Table waveform;
  Table slots;
  nlohmann::json metadata;
  int exit_code = 0;
};

/// Time-domain run of the filter network; emits the waveform table and the
/// per-slot integrate-and-dump table.
TransientResult cmd_transient(const RunConfig& config);

}  // namespace slipt
