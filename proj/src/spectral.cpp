#include "slipt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slipt {

void ReceiverSpec::validate() const {
  if (junctions.empty()) throw ConfigError("ReceiverSpec: need at least one junction");
  for (const auto& j : junctions) j.validate();
  if (!(r_l > 0.0) || !(r_d > 0.0) || !(c_d > 0.0) || !(l > 0.0) || !(v_t > 0.0) || !(a_p > 0.0)) {
    throw ConfigError("ReceiverSpec: circuit elements and cell area must be positive");
  }
  if (info_junction < 0 || info_junction >= n()) {
    throw ConfigError("ReceiverSpec: info_junction out of range");
  }
  if (r0_override && !(*r0_override >= 0.0)) {
    throw ConfigError("ReceiverSpec: responsivity override must be >= 0");
  }
  // Passbands must not intersect (shared endpoints are allowed).
  std::vector<SpectralBand> bands;
  bands.reserve(junctions.size());
  for (const auto& j : junctions) bands.push_back(j.band);
  std::sort(bands.begin(), bands.end(),
            [](const SpectralBand& a, const SpectralBand& b) { return a.lambda_min < b.lambda_min; });
  for (std::size_t i = 1; i < bands.size(); ++i) {
    if (bands[i].lambda_min < bands[i - 1].lambda_max) {
      throw ConfigError("ReceiverSpec: junction passbands overlap");
    }
  }
}

void EnergySignal::validate() const {
  for (const auto& line : lines) {
    if (!(line.lambda > 0.0)) throw ConfigError("EnergySignal: line wavelength must be positive");
    if (!(line.power >= 0.0) || !(line.gain >= 0.0)) {
      throw ConfigError("EnergySignal: line power and gain must be >= 0");
    }
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t k = i + 1; k < lines.size(); ++k) {
      if (lines[i].lambda == lines[k].lambda) {
        throw ConfigError("EnergySignal: line wavelengths must be distinct");
      }
    }
  }
}

double planck_radiance(double lambda, double temperature, const PhysicalConstants& pc) {
  if (!(lambda > 0.0)) throw DomainError("planck_radiance: lambda must be positive");
  if (!(temperature > 0.0)) throw DomainError("planck_radiance: temperature must be positive");
  const double x = pc.k_p * pc.c / (pc.k_b * temperature * lambda);
  const double lam2 = lambda * lambda;
  const double pre = 2.0 * pc.k_p * pc.c * pc.c / (lam2 * lam2 * lambda);
  // exp(x) overflows for x > ~709; there 1/(e^x - 1) == e^-x to full precision.
  if (x > 700.0) return pre * std::exp(-x);
  return pre / std::expm1(x);
}

double ambient_psd(double lambda, const AmbientModel& ambient, const ReceiverSpec& rx,
                   const PhysicalConstants& pc) {
  return ambient.mu_a * pc.nu_s(rx.a_p) * planck_radiance(lambda, pc.t_sun, pc);
}

double responsivity(double lambda, const JunctionSpec& junction, const PhysicalConstants& pc) {
  if (!(lambda > 0.0)) throw DomainError("responsivity: lambda must be positive");
  if (!junction.band.contains(lambda)) return 0.0;
  return lambda * junction.eta * pc.q_0 / (pc.k_p * pc.c);
}

PhotocurrentState photocurrents(const ReceiverSpec& rx, const AmbientModel& ambient,
                                const EnergySignal& energy, const InfoSignal& info,
                                const PhysicalConstants& pc, const QuadratureOptions& quad) {
  rx.validate();
  ambient.validate();
  energy.validate();
  info.validate();
  pc.validate();

  PhotocurrentState state;
  state.j_a.assign(rx.junctions.size(), 0.0);

  const double scale = ambient.mu_a * pc.nu_s(rx.a_p);
  for (std::size_t ni = 0; ni < rx.junctions.size(); ++ni) {
    const JunctionSpec& jn = rx.junctions[ni];
    double j = 0.0;
    // Delta lines contribute analytically: p_n * g_n * r_n(lambda_n).
    for (const auto& line : energy.lines) {
      j += line.power * line.gain * responsivity(line.lambda, jn, pc);
    }
    // Ambient black-body term integrated over the junction band only
    // (the responsivity vanishes outside it).
    if (scale > 0.0) {
      const double mu = jn.eta * pc.q_0 / (pc.k_p * pc.c);
      j += scale * integrate(
                       [&](double lambda) {
                         return planck_radiance(lambda, pc.t_sun, pc) * lambda * mu;
                       },
                       jn.band.lambda_min, jn.band.lambda_max, quad);
    }
    state.j_a[ni] = j;
  }

  const JunctionSpec& info_jn = rx.junctions[static_cast<std::size_t>(rx.info_junction)];
  const double r0 = rx.r0_override ? *rx.r0_override : responsivity(info.lambda0, info_jn, pc);
  if (r0 == 0.0 && !rx.r0_override) {
    bool covered = false;
    int covering = -1;
    for (int k = 0; k < rx.n(); ++k) {
      if (rx.junctions[static_cast<std::size_t>(k)].band.contains(info.lambda0)) {
        covered = true;
        covering = k;
        break;
      }
    }
    if (!covered) {
      throw ConfigError(
          "photocurrents: carrier wavelength lies outside every junction passband and no "
          "responsivity override is set");
    }
    throw ConfigError("photocurrents: carrier wavelength is covered by junction " +
                      std::to_string(covering + 1) + " but info_junction is " +
                      std::to_string(rx.info_junction + 1));
  }
  state.g_s = info.h * r0;
  return state;
}

}  // namespace slipt
