#include "cloudscat/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cloudscat::specfun {
namespace {

using ld = long double;

constexpr ld kPiL = 3.141592653589793238462643383279502884L;
constexpr ld kGammaL = 0.5772156649015328606065120900824024L;

void require_finite(double x, const char* who) {
  if (!std::isfinite(x)) {
    throw std::domain_error(std::string(who) + ": argument is not finite");
  }
}

void require_positive(double x, const char* who) {
  require_finite(x, who);
  if (!(x > 0.0)) {
    throw std::domain_error(std::string(who) + ": argument must be > 0");
  }
}

// Terms of the ascending series peak near k = x/2; for x < 8 the largest term
// is ~1e2, which the 64-bit long double mantissa absorbs with room to spare.
constexpr int kSeriesTerms = 60;

struct SeriesOrder0 {
  ld j0;
  ld harmonic_sum;  // sum_{k>=1} (-1)^{k+1} H_k q^k / (k!)^2
};

SeriesOrder0 series_order0(ld x) {
  const ld q = x * x / 4.0L;
  ld term = 1.0L;
  ld j0 = 1.0L;
  ld hk = 0.0L;
  ld hsum = 0.0L;
  for (int k = 1; k < kSeriesTerms; ++k) {
    term *= -q / (static_cast<ld>(k) * k);
    hk += 1.0L / k;
    j0 += term;
    hsum -= hk * term;
  }
  return {j0, hsum};
}

struct SeriesOrder1 {
  ld j1;
  ld harmonic_sum;  // (x/2) sum_{k>=0} (-1)^k (H_k + H_{k+1}) q^k / (k!(k+1)!)
};

SeriesOrder1 series_order1(ld x) {
  const ld half = x / 2.0L;
  const ld q = half * half;
  ld term = half;  // k = 0 term of J1
  ld j1 = term;
  ld hk = 0.0L;
  ld hk1 = 1.0L;
  ld hsum = term * (hk + hk1);
  for (int k = 1; k < kSeriesTerms; ++k) {
    term *= -q / (static_cast<ld>(k) * (k + 1));
    hk = hk1;
    hk1 += 1.0L / (k + 1);
    j1 += term;
    hsum += term * (hk + hk1);
  }
  return {j1, hsum};
}

ld y0_series(ld x) {
  const auto s = series_order0(x);
  return (2.0L / kPiL) * ((std::log(x / 2.0L) + kGammaL) * s.j0 + s.harmonic_sum);
}

ld y1_series(ld x) {
  const auto s = series_order1(x);
  return (2.0L / kPiL) * (std::log(x / 2.0L) + kGammaL) * s.j1 - 2.0L / (kPiL * x) -
         s.harmonic_sum / kPiL;
}

// Trapezoidal nodes s_n = n * kStep, n = 0..kNodes-1; e^{-s^2} < 1e-16 beyond.
constexpr double kStep = 0.2;
constexpr int kNodes = 32;

// Modulation factor of the Hankel integral for order 0 or 1, normalised so
// that it tends to 1 as x -> infinity.
std::complex<double> hankel_modulation(double x, int order) {
  const double c = 1.0 / (2.0 * x);
  std::complex<double> acc;
  for (int n = 0; n < kNodes; ++n) {
    const double s = n * kStep;
    const double s2 = s * s;
    const double w = (n == 0 ? 1.0 : 2.0) * std::exp(-s2);
    const std::complex<double> root = std::sqrt(std::complex<double>(1.0, c * s2));
    if (order == 0) {
      acc += w / root;
    } else {
      acc += w * s2 * root;
    }
  }
  const double norm = (order == 0 ? 1.0 : 2.0) * kStep / std::sqrt(std::numbers::pi);
  return acc * norm;
}

std::complex<double> hankel_asymptotic(double x, int order) {
  const double c = std::cos(x);
  const double s = std::sin(x);
  const double r = std::numbers::sqrt2 / 2.0;
  // e^{i(x - pi/4)} for order 0, e^{i(x - 3pi/4)} for order 1.
  const std::complex<double> phase =
      order == 0 ? std::complex<double>((c + s) * r, (s - c) * r)
                 : std::complex<double>((s - c) * r, -(s + c) * r);
  const double amplitude = std::sqrt(2.0 / (std::numbers::pi * x));
  return amplitude * phase * hankel_modulation(x, order);
}

}  // namespace

double bessel_j0(double x) {
  require_finite(x, "bessel_j0");
  if (x < 0.0) throw std::domain_error("bessel_j0: argument must be >= 0");
  if (x < kSeriesSwitch) return static_cast<double>(series_order0(x).j0);
  return hankel_asymptotic(x, 0).real();
}

double bessel_y0(double x) {
  require_positive(x, "bessel_y0");
  if (x < kSeriesSwitch) return static_cast<double>(y0_series(x));
  return hankel_asymptotic(x, 0).imag();
}

std::complex<double> hankel1_0(double x) {
  require_positive(x, "hankel1_0");
  if (x < kSeriesSwitch) {
    return {static_cast<double>(series_order0(x).j0), static_cast<double>(y0_series(x))};
  }
  return hankel_asymptotic(x, 0);
}

double bessel_j1(double x) {
  require_finite(x, "bessel_j1");
  if (x < 0.0) throw std::domain_error("bessel_j1: argument must be >= 0");
  if (x < kSeriesSwitch) return static_cast<double>(series_order1(x).j1);
  return hankel_asymptotic(x, 1).real();
}

double bessel_y1(double x) {
  require_positive(x, "bessel_y1");
  if (x < kSeriesSwitch) return static_cast<double>(y1_series(x));
  return hankel_asymptotic(x, 1).imag();
}

std::complex<double> hankel1_1(double x) {
  require_positive(x, "hankel1_1");
  if (x < kSeriesSwitch) {
    return {static_cast<double>(series_order1(x).j1), static_cast<double>(y1_series(x))};
  }
  return hankel_asymptotic(x, 1);
}

}  // namespace cloudscat::specfun
