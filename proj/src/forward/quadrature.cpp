#include <cmath>
#include <numbers>

#include "cloudscat/forward.hpp"
#include "cloudscat/specfun.hpp"

namespace cloudscat::forward {

cplx green_phi(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("green_phi: r must be finite and > 0 (the diagonal uses beta1)");
  }
  return cplx(0.0, -0.25) * specfun::hankel1_0(r);
}

cplx beta1(double h, double k, double c1) {
  return {(std::log(h * k / 2.0) + specfun::kEulerGamma + c1) / (2.0 * std::numbers::pi), -0.25};
}

QuadratureWeights::QuadratureWeights(double k, const Grid2D& grid, double c1)
    : k_(k), h_(grid.h()), c1_(c1), n_(grid.n()) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("QuadratureWeights: k must be > 0");
  const int side = n_ + 1;
  table_.assign(static_cast<std::size_t>(side) * side, cplx{});
  for (int dy = 0; dy < side; ++dy) {
    for (int dx = 0; dx <= dy; ++dx) {
      const cplx v = (dx == 0 && dy == 0) ? forward::beta1(h_, k_, c1_)
                                          : green_phi(k_ * h_ * std::hypot(dx, dy));
      table_[static_cast<std::size_t>(dy) * side + dx] = v;
      table_[static_cast<std::size_t>(dx) * side + dy] = v;
    }
  }
}

ComplexField incident_plane_wave(Point2 direction, double k, const Grid2D& grid) {
  if (std::abs(norm(direction) - 1.0) > 1e-12) {
    throw DomainError("incident_plane_wave: direction must be a unit vector");
  }
  ComplexField out{grid, std::vector<cplx>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double phase = k * dot(grid.node(i), direction);
    out.values[i] = {std::cos(phase), std::sin(phase)};
  }
  return out;
}

double relative_l2(const ComplexField& a, const ComplexField& b) {
  if (a.values.size() != b.values.size()) throw std::invalid_argument("relative_l2: size mismatch");
  long double num = 0.0L, den = 0.0L;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(b.values[i]);
  }
  return static_cast<double>(std::sqrt(num / den));
}

}  // namespace cloudscat::forward
