#pragma once

#include <complex>

// Bessel functions of order zero and the outgoing Hankel function used by the
// two-dimensional Helmholtz Green's function.
//
// Two regimes, switching at x = kSeriesSwitch:
//   - x < 8: ascending power series accumulated in extended precision,
//   - x >= 8: the Hankel integral representation
//       H_v(x) = sqrt(2/(pi x)) e^{i(x - v pi/2 - pi/4)} / Gamma(v + 1/2)
//                * int_0^inf e^{-u} u^{v-1/2} (1 + i u/(2x))^{v-1/2} du,
//     evaluated by the trapezoidal rule after u = s^2. The integrand is
//     analytic in the strip |Im s| < sqrt(x), so the rule converges
//     geometrically and a fixed 32-node sum reaches full double precision.

namespace cloudscat::specfun {

inline constexpr double kSeriesSwitch = 8.0;
inline constexpr double kEulerGamma = 0.5772156649015328606065120900824024;

/// J0(x) for finite x >= 0. Throws std::domain_error otherwise.
double bessel_j0(double x);

/// Y0(x) for x > 0. Throws std::domain_error at x <= 0 (log singularity).
double bessel_y0(double x);

/// H0^(1)(x) = J0(x) + i Y0(x), x > 0.
std::complex<double> hankel1_0(double x);

/// First-order companions. Only used for derivatives (J0' = -J1, Y0' = -Y1).
double bessel_j1(double x);
double bessel_y1(double x);
std::complex<double> hankel1_1(double x);

}  // namespace cloudscat::specfun
