#pragma once

#include "slipt/errors.hpp"

namespace slipt {

/// Physical constants (CODATA 2018 exact values where defined) plus the
/// sun/earth geometry used by the black-body ambient light model.
struct PhysicalConstants {
  double c = 2.99792458e8;        ///< speed of light, m/s
  double k_p = 6.62607015e-34;    ///< Planck constant, J*s
  double k_b = 1.380649e-23;      ///< Boltzmann constant, J/K
  double q_0 = 1.602176634e-19;   ///< elementary charge, C
  double t_sun = 5778.0;          ///< black-body temperature of the sun, K
  double alpha_se = 5.72e-9;      ///< solid angle of Earth seen from the sun, sr
  double a_sun = 6.07e18;         ///< sun surface area, m^2
  double a_earth = 5.1e14;        ///< Earth surface area, m^2

  /// Equivalent cell size nu_s = alpha_SE * A_S * A_P / A_E for cell area
  /// a_p in m^2.  ~6.8e-9 sr*m^2 for a 1 cm^2 cell.
  double nu_s(double a_p) const { return alpha_se * a_sun * a_p / a_earth; }

  void validate() const {
    if (c <= 0 || k_p <= 0 || k_b <= 0 || q_0 <= 0 || t_sun <= 0 ||
        alpha_se <= 0 || a_sun <= 0 || a_earth <= 0) {
      throw DomainError("PhysicalConstants: all constants must be strictly positive");
    }
  }
};

}  // namespace slipt
