#pragma once

#include <cstdint>
#include <functional>

#include "slipt/ehmodel.hpp"
#include "slipt/spectral.hpp"

namespace slipt {

/// Receiver output span over the transmit-power range:
/// x0 = sqrt(P(0)), xA = sqrt(P(g_s A^2)), theta = xA - x0.
struct SensitivityResult {
  double x0 = 0.0;
  double x_a = 0.0;
  double theta = 0.0;
};

/// Variance of the normalized output AWGN, same normalized units as x^2.
struct NoiseModel {
  double sigma_sq = 1e-9;
  void validate() const {
    if (!(sigma_sq > 0.0)) throw ConfigError("NoiseModel: sigma_sq must be positive");
  }
  double sigma() const { return std::sqrt(sigma_sq); }
};

/// P_harv as a function of the information photocurrent j^s, together with
/// its derivative and the current gain g_s.  Model-backed in production;
/// tests may wrap arbitrary callables (e.g. a linear toy receiver).
class PharvCurve {
 public:
  PharvCurve(EhModelKind kind, PhotocurrentState state, ReceiverSpec rx);
  PharvCurve(std::function<double(double)> p_of_js, std::function<double(double)> dp_djs,
             double g_s);

  double g_s() const { return g_s_; }
  double pharv_js(double js) const { return p_(js); }
  double dpharv_djs(double js) const { return dp_(js); }
  double pharv_s(double s) const { return p_(g_s_ * s); }

  /// Output amplitude x(s) = sqrt(P(g_s s)).
  double x_of_s(double s) const;
  /// dx/ds, with a finite-difference fallback where P = 0 exactly.
  double dx_ds(double s, double a_sq) const;

 private:
  std::function<double(double)> p_;
  std::function<double(double)> dp_;
  double g_s_ = 0.0;
};

enum class DistKind { optimal_fstar, uniform, ook };

const char* to_string(DistKind kind);

/// Input distribution for the transmit symbol s on [0, A^2], carrying the
/// receiver/model context it was designed against.
struct InputDistribution {
  DistKind kind = DistKind::optimal_fstar;
  double a_sq = 0.0;
  PharvCurve curve;
};

SensitivityResult sensitivity(double a_sq, const PharvCurve& curve);
SensitivityResult sensitivity(double a_sq, const PhotocurrentState& state, const ReceiverSpec& rx,
                              EhModelKind model);

/// Rate-maximizing cdf F*_s(s); throws DegenerateDistributionError when theta == 0.
double optimal_cdf(double s, double a_sq, const PharvCurve& curve);

/// Inverse-transform sampling of F*_s: maps u in [0,1] to s in [0, A^2].
double sample_optimal(double u, double a_sq, const PharvCurve& curve);

/// Maximum achievable rate 0.5 ln(1 + theta^2 / (2 pi e sigma^2)), nats/use.
/// (All rate outputs are entropy-power-inequality lower bounds.)
double max_rate(double a_sq, const PharvCurve& curve, const NoiseModel& noise);

/// Achievable rate for a continuous input distribution via the differential
/// entropy of x.  OOK has no density and is handled by the BER path.
double rate_for_cdf(const InputDistribution& dist, const NoiseModel& noise);

/// Average harvested power under F*_s: (xA^2 + x0^2 + xA x0) / 3.
double avg_power_optimal(double a_sq, const PharvCurve& curve);

/// Average harvested power E[P(g_s s)] for an input distribution, by
/// quadrature for continuous distributions and exactly for OOK.
double avg_power_for_cdf(const InputDistribution& dist);

/// Maximum-likelihood OOK decision: returns a_sq iff y >= (x0 + xA)/2.
double ml_detect(double y, const SensitivityResult& sens, double a_sq);

/// Gaussian tail Q(z), evaluated to avoid premature underflow in deep tails.
double q_function(double z);

/// Analytic OOK bit-error probability Q(theta / (2 sigma)).
double ber_analytic(double a_sq, const PharvCurve& curve, const NoiseModel& noise);

struct BerEstimate {
  double ber = 0.0;
  double ci_halfwidth_95 = 0.0;
  std::uint64_t errors = 0;
  std::uint64_t trials = 0;
};

/// Monte Carlo OOK BER with ML detection.  Counter-based seeding makes the
/// result a function of (seed, trials) only, independent of `jobs`.
BerEstimate ber_monte_carlo(double a_sq, const PharvCurve& curve, const NoiseModel& noise,
                            std::uint64_t trials, std::uint64_t seed, int jobs = 1);

}  // namespace slipt
