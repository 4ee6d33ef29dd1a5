#pragma once

#include <optional>
#include <vector>

#include "slipt/constants.hpp"
#include "slipt/errors.hpp"
#include "slipt/quadrature.hpp"

namespace slipt {

/// Wavelength passband [lambda_min, lambda_max], meters.
struct SpectralBand {
  double lambda_min = 0.0;
  double lambda_max = 0.0;

  bool contains(double lambda) const { return lambda >= lambda_min && lambda <= lambda_max; }
  double midpoint() const { return 0.5 * (lambda_min + lambda_max); }
  void validate() const {
    if (!(lambda_min > 0.0) || !(lambda_min < lambda_max)) {
      throw ConfigError("SpectralBand: require 0 < lambda_min < lambda_max");
    }
  }
};

/// Electrical and optical description of one p-n junction.
struct JunctionSpec {
  SpectralBand band;
  double eta = 0.7;       ///< conversion efficiency factor, dimensionless
  double i_sat1 = 1e-9;   ///< reverse-bias saturation current, diffusion diode, A
  double i_sat2 = 1e-9;   ///< reverse-bias saturation current, recombination diode, A
  double r_sh = 1e8;      ///< shunt resistance, Ohm
  double r_s = 100.0;     ///< series resistance, Ohm

  void validate() const {
    band.validate();
    if (!(i_sat1 > 0.0) || !(i_sat2 > 0.0) || !(r_sh > 0.0) || !(r_s > 0.0)) {
      throw ConfigError("JunctionSpec: saturation currents and resistances must be positive");
    }
    if (!(eta > 0.0) || eta > 1.0) {
      throw ConfigError("JunctionSpec: require 0 < eta <= 1");
    }
  }
};

/// The full N-junction photovoltaic receiver with its filter network.
struct ReceiverSpec {
  std::vector<JunctionSpec> junctions;
  double r_l = 1e4;       ///< EH load resistance, Ohm
  double r_d = 1e4;       ///< information load resistance, Ohm
  double c_d = 2.5e-6;    ///< high-pass capacitance, F
  double l = 1e-2;        ///< low-pass inductance, H
  double v_t = 0.025851999786435893;  ///< thermal voltage k_b*300K/q_0, V
  double a_p = 1e-4;      ///< cell area, m^2
  int info_junction = 0;  ///< 0-based index of the junction receiving the carrier
  std::optional<double> r0_override;  ///< responsivity at lambda_0 when set, A/W

  int n() const { return static_cast<int>(junctions.size()); }

  /// R_Sigma = sum of junction series resistances plus the EH load.
  double r_sigma() const {
    double r = r_l;
    for (const auto& j : junctions) r += j.r_s;
    return r;
  }

  void validate() const;
};

/// Ambient light intensity coefficient scaling the black-body spectrum.
struct AmbientModel {
  double mu_a = 0.0;
  void validate() const {
    if (!(mu_a >= 0.0)) throw ConfigError("AmbientModel: mu_a must be >= 0");
  }
};

/// Energy-providing signal: a sum of monochromatic laser lines.
struct EnergySignal {
  struct Line {
    double lambda = 0.0;  ///< wavelength, m
    double power = 0.0;   ///< power, W
    double gain = 1.0;    ///< channel gain, dimensionless
  };
  std::vector<Line> lines;
  void validate() const;
};

/// Intensity-modulated information carrier.
struct InfoSignal {
  double lambda0 = 980e-9;  ///< carrier wavelength, m
  double h = 1.0;           ///< scalar channel gain
  double a_sq = 0.1;        ///< maximum transmit power A^2, W
  double t = 1e-3;          ///< symbol period, s
  void validate() const {
    if (!(lambda0 > 0.0)) throw ConfigError("InfoSignal: lambda0 must be positive");
    if (!(h >= 0.0) || !(a_sq >= 0.0)) throw ConfigError("InfoSignal: h and A^2 must be >= 0");
    if (!(t > 0.0)) throw ConfigError("InfoSignal: symbol period must be positive");
  }
};

/// Induced DC photocurrents (ambient + energy signal) per junction, plus the
/// information-current gain g_s = h * r_info(lambda_0).
struct PhotocurrentState {
  std::vector<double> j_a;  ///< A, one entry per junction
  double g_s = 0.0;         ///< A/W
};

/// Planck spectral radiance, W * m^-2 * sr^-1 * m^-1.  Stable for
/// k_p*c/(k_b*T*lambda) >> 1 (short-wave tail evaluated via exp(-x)).
double planck_radiance(double lambda, double temperature, const PhysicalConstants& pc = {});

/// Ambient power spectral density mu_a * nu_s * p_B(lambda), W/m.
double ambient_psd(double lambda, const AmbientModel& ambient, const ReceiverSpec& rx,
                   const PhysicalConstants& pc = {});

/// Junction responsivity r(lambda) = lambda * eta * q_0 / (k_p * c) inside the
/// passband, zero outside.  A/W.
double responsivity(double lambda, const JunctionSpec& junction, const PhysicalConstants& pc = {});

/// Assemble the per-junction DC photocurrents: analytic delta-line terms plus
/// the ambient black-body integral over each junction band.
PhotocurrentState photocurrents(const ReceiverSpec& rx, const AmbientModel& ambient,
                                const EnergySignal& energy, const InfoSignal& info,
                                const PhysicalConstants& pc = {},
                                const QuadratureOptions& quad = {});

}  // namespace slipt
