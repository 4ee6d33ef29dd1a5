#pragma once

#include <vector>

#include "slipt/ehmodel.hpp"
#include "slipt/spectral.hpp"

namespace slipt {

/// Converged DC operating point of the full N-junction stack with the EH load.
struct DcOperatingPoint {
  std::vector<double> v;      ///< junction voltages, V
  double i_eh = 0.0;          ///< EH branch current, A
  int iterations = 0;
  double residual_norm = 0.0; ///< max KCL residual, A (voltage row scaled by 1/R_Sigma)
};

/// Damped-Newton solve of the simultaneous system
///   Phi_n(v_n) = i  (n = 1..N),   sum_n v_n = i * R_Sigma
/// from the zero start.  Deliberately a different method from the nested
/// bisection in solve_accurate, so the two act as mutual oracles.
DcOperatingPoint solve_dc(const ReceiverSpec& rx, const std::vector<double>& j);

/// Per-slot summary of the transient run.
struct SlotRecord {
  double r = 0.0;          ///< integrate-and-dump output int R_d i_ID dt, V*s
  double i_id_end = 0.0;   ///< i_ID at the slot boundary, A
  double i_id_peak = 0.0;  ///< max |i_ID| inside the slot, A
  double i_eh_end = 0.0;   ///< i_EH at the slot boundary, A
  double v_c_end = 0.0;    ///< capacitor voltage at the slot boundary, V
};

struct TransientTrace {
  std::vector<double> t;      ///< decimated sample times, s
  std::vector<double> i_out;  ///< stack output current, A
  std::vector<double> i_eh;   ///< EH (inductor) branch current, A
  std::vector<double> i_id;   ///< information (capacitor) branch current, A
  std::vector<double> v_c;    ///< high-pass capacitor voltage, V
  std::vector<SlotRecord> slots;
  double mean_eh_power_last_half = 0.0;  ///< time-average R_L i_EH^2 over the trailing half, W
};

struct TransientOptions {
  double dt = 0.0;            ///< step, s; default symbol_period / 1e4 when 0
  bool cold_start = false;    ///< zero initial state instead of the DC warm start
  std::size_t max_samples = 200000;  ///< decimation budget for the stored waveforms
};

/// Implicit-trapezoidal integration of the two-state (v_C, i_L) network with
/// the nonlinear junction stack solved by per-step Newton.  `symbols` holds
/// the transmit power s[k] (W) for consecutive slots of length
/// `symbol_period`.
TransientTrace simulate_transient(const ReceiverSpec& rx, const PhotocurrentState& state,
                                  const std::vector<double>& symbols, double symbol_period,
                                  const TransientOptions& opt = {});

}  // namespace slipt
