#include "cloudscat/grid.hpp"

#include <stdexcept>
#include <string>

namespace cloudscat {

Grid2D::Grid2D(int n, double h, Point2 origin) : n_(n), h_(h), origin_(origin) {
  if (n < 8) throw std::invalid_argument("Grid2D: N must be >= 8, got " + std::to_string(n));
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("Grid2D: h must be > 0");
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) {
    throw std::invalid_argument("Grid2D: origin must be finite");
  }
}

Grid2D Grid2D::centered(double half_width, double h) {
  const double cells = 2.0 * half_width / h;
  const long n = std::lround(cells);
  if (std::abs(cells - static_cast<double>(n)) > 1e-9 * cells) {
    throw std::invalid_argument("Grid2D::centered: 2*half_width/h is not an integer");
  }
  return Grid2D(static_cast<int>(n), h, {-half_width, -half_width});
}

long Grid2D::find_node(Point2 p) const {
  const double f1 = (p.x - origin_.x) / h_;
  const double f2 = (p.y - origin_.y) / h_;
  const long j1 = std::lround(f1);
  const long j2 = std::lround(f2);
  if (std::abs(f1 - static_cast<double>(j1)) > 1e-9 || std::abs(f2 - static_cast<double>(j2)) > 1e-9) {
    return -1;
  }
  if (j1 < 0 || j2 < 0 || j1 > n_ || j2 > n_) return -1;
  return static_cast<long>(index(static_cast<int>(j1), static_cast<int>(j2)));
}

bool Grid2D::refines(const Grid2D& coarse) const {
  return find_node(coarse.node(0, 0)) >= 0 && find_node(coarse.node(coarse.n(), coarse.n())) >= 0 &&
         find_node(coarse.node(1, 1)) >= 0;
}

ScattererField::ScattererField(const Grid2D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("ScattererField: value count does not match grid");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v)) throw std::invalid_argument("ScattererField: non-finite contrast");
    if (v == -1.0) throw std::invalid_argument("ScattererField: contrast b = -1 is not allowed");
    if (v != 0.0) support_.push_back(i);
  }
}

ScattererField ScattererField::piecewise_constant(const Grid2D& grid, const std::vector<bool>& inside,
                                                  double b_value) {
  if (inside.size() != grid.size()) {
    throw std::invalid_argument("ScattererField: mask size does not match grid");
  }
  std::vector<double> values(grid.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (inside[i]) values[i] = b_value;
  }
  return ScattererField(grid, std::move(values));
}

ScattererField ScattererField::from_values(const Grid2D& grid, std::vector<double> values) {
  return ScattererField(grid, std::move(values));
}

ScattererField ScattererField::zero(const Grid2D& grid) {
  return ScattererField(grid, std::vector<double>(grid.size(), 0.0));
}

}  // namespace cloudscat
