#pragma once

#include <string>
#include <vector>

#include "slipt/spectral.hpp"

namespace slipt {

enum class EhModelKind {
  accurate,              ///< nested-bisection fixed point of the full two-diode stack
  approximate,           ///< product equation, solved in log domain
  closed_form_single,    ///< N = 1 Lambert-W closed form
  closed_form_multi,     ///< N >= 1 logarithmic closed form (high-current regime)
  baseline_single_diode, ///< diffusion-diode-only closed form (comparison baseline)
  baseline_mpp,          ///< maximum-power-point baseline with calibration scaling
};

const char* to_string(EhModelKind kind);
EhModelKind eh_model_from_string(const std::string& name);

/// One energy-harvesting operating point.  p_harv == r_l * i_eh^2 always
/// holds bit-for-bit; construct through make_eh_solution to keep it that way.
struct EhSolution {
  double i_eh = 0.0;          ///< output DC current, A
  std::vector<double> v;      ///< junction voltages, V
  double p_harv = 0.0;        ///< harvested power, W
  EhModelKind model = EhModelKind::accurate;
  double residual = 0.0;      ///< final solver residual, model-specific units
  std::string warning;        ///< non-empty when a model quality guard tripped
};

EhSolution make_eh_solution(EhModelKind kind, double i_eh, std::vector<double> v,
                            double r_l, double residual);

/// Junction current law Phi(v) = j_n - I1(e^{v/Vt} - 1) - I2(e^{v/2Vt} - 1) - v/Rsh.
/// Throws SaturationError when v/v_t exceeds the +700 overflow guard.
double phi(double v, const JunctionSpec& junction, double j_n, double v_t);

/// Total (non-throwing) variant with the exponent clamped at +700; sets
/// *clamped when the guard engaged.  Used inside solvers.
double phi_clamped(double v, const JunctionSpec& junction, double j_n, double v_t,
                   bool* clamped = nullptr) noexcept;

/// dPhi/dv, evaluated consistently with the clamped exponential.
double phi_derivative(double v, const JunctionSpec& junction, double v_t) noexcept;

/// Inverse of the strictly decreasing Phi: the unique v with Phi(v) = i.
double phi_inverse(double i, const JunctionSpec& junction, double j_n, double v_t);

/// Per-junction currents j_n = j_a[n] + g_s * s on the info junction.
std::vector<double> junction_currents(const PhotocurrentState& state, double s,
                                      const ReceiverSpec& rx);

// The four EH models plus the two comparison baselines.  `s` is the transmit
// power of the information signal in watts.
EhSolution solve_accurate(const PhotocurrentState& state, double s, const ReceiverSpec& rx);
EhSolution solve_approximate(const PhotocurrentState& state, double s, const ReceiverSpec& rx);
EhSolution closed_form_single(const PhotocurrentState& state, double s, const ReceiverSpec& rx);
EhSolution closed_form_multi(const PhotocurrentState& state, double s, const ReceiverSpec& rx);
EhSolution baseline_single_diode(const PhotocurrentState& state, double s, const ReceiverSpec& rx);
double baseline_mpp(const PhotocurrentState& state, double s, const ReceiverSpec& rx);

/// Current-vector entry points (used by the validation battery and tests).
EhSolution solve_accurate_currents(const std::vector<double>& j, const ReceiverSpec& rx);
EhSolution solve_approximate_currents(const std::vector<double>& j, const ReceiverSpec& rx);

/// Dispatch by model kind; baseline_mpp is wrapped into an EhSolution with
/// i_eh = sqrt(p / r_l).
EhSolution eval_eh_model(EhModelKind kind, const PhotocurrentState& state, double s,
                         const ReceiverSpec& rx);

/// Harvested power as a function of the information photocurrent j^s directly
/// (bypasses s so finite-difference probes can step below s = 0).
double pharv_at_js(EhModelKind kind, const PhotocurrentState& state, const ReceiverSpec& rx,
                   double js);

/// dP_harv / dj^s at j^s = g_s * s.  Analytic for the closed forms and the MPP
/// baseline, fourth-order central differences for accurate/approximate.
/// Clamped to >= 0.
double dp_harv_djs(EhModelKind kind, const PhotocurrentState& state, double s,
                   const ReceiverSpec& rx);

/// Same derivative evaluated at an explicit information photocurrent j^s.
double dp_harv_djs_at(EhModelKind kind, const PhotocurrentState& state, const ReceiverSpec& rx,
                      double js);

/// Raw (uncalibrated) maximum power point max_v v*Phi(v; j) of a junction.
double mpp_power_raw(const JunctionSpec& junction, double j, double v_t);

/// Identical-saturation-current reduction for unequal diode currents: the I
/// minimizing the integral over [v_lo, v_hi] of
/// |I1 e^{v/Vt} + I2 e^{v/2Vt} - I (e^{v/Vt} + e^{v/2Vt})|.
double fit_saturation_current(const JunctionSpec& junction, double v_t, double v_lo, double v_hi);

}  // namespace slipt
