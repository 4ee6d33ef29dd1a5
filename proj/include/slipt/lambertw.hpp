#pragma once

namespace slipt {

/// Principal-branch Lambert-W evaluated from the natural log of its argument:
/// returns w >= 0 with w * exp(w) = exp(y).
///
/// The log-domain form is required because the diode fixed-point equations
/// produce arguments exp(y) with y of order R_Sigma/V_T * j ~ 1e4..1e5, far
/// beyond double range.  Accuracy is a few ulp over the whole positive branch.
double lambert_w0_exp(double y);

/// W0(x) for x >= 0; thin wrapper over lambert_w0_exp(log(x)).
double lambert_w0(double x);

}  // namespace slipt
