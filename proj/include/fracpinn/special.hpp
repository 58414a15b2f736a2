#pragma once

namespace fracpinn {

/// Exponential integral E1(x) = int_x^inf exp(-t)/t dt for x > 0.
/// Power series for x <= 1, modified Lentz continued fraction for x > 1;
/// relative accuracy better than 1e-13 across the range.
double exp_integral_e1(double x);

/// Normalization constant of the singular-integral representation of the
/// fractional power, defined by 1 = c_s * int_0^inf t^{-1-s/2}(1-e^{-t}) dt,
/// computed by quadrature. Valid for s in (0,2).
double c_s_constant(double s);

/// Closed form (s/2)/Gamma(1-s/2) for cross-checking c_s_constant.
double c_s_closed_form(double s);

/// int_0^1 u^{-1-s/2}(1-e^{-u}) du + int_1^inf u^{-1-s/2}(1-e^{-u}) du,
/// the u-integral left after substituting u = t*lambda. The [0,1] part has
/// its Taylor head integrated analytically; the tail splits off the exact
/// power integral and quadratures the decaying remainder on [1,U].
double frac_power_u_integral(double s);

}  // namespace fracpinn
