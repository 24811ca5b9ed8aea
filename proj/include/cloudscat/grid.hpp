#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace cloudscat {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Axis-aligned box [lo.x, hi.x] x [lo.y, hi.y]; the problem domain G.
struct Box {
  Point2 lo;
  Point2 hi;

  bool contains(Point2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  double diagonal() const { return distance(lo, hi); }
};

/// Uniform lattice {origin + h (j1, j2) : 0 <= j1, j2 <= N}.
/// Nodes are stored row-major in j2: flat index = j2 * (N + 1) + j1.
class Grid2D {
 public:
  Grid2D(int n, double h, Point2 origin);

  /// Grid of spacing h covering [-half_width, half_width]^2 exactly;
  /// 2 * half_width / h must be an integer.
  static Grid2D centered(double half_width, double h);

  int n() const { return n_; }
  double h() const { return h_; }
  Point2 origin() const { return origin_; }
  int side() const { return n_ + 1; }
  std::size_t size() const { return static_cast<std::size_t>(side()) * side(); }

  std::size_t index(int j1, int j2) const {
    return static_cast<std::size_t>(j2) * side() + j1;
  }
  int j1(std::size_t idx) const { return static_cast<int>(idx % side()); }
  int j2(std::size_t idx) const { return static_cast<int>(idx / side()); }
  Point2 node(int j1, int j2) const { return {origin_.x + h_ * j1, origin_.y + h_ * j2}; }
  Point2 node(std::size_t idx) const { return node(j1(idx), j2(idx)); }
  Box bounds() const { return {origin_, node(n_, n_)}; }

  /// Flat index of the node at p, or -1 when p is not a node (tolerance 1e-9 h).
  long find_node(Point2 p) const;

  /// True when every node of `coarse` is a node of this grid.
  bool refines(const Grid2D& coarse) const;

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  int n_;
  double h_;
  Point2 origin_;
};

/// Real contrast b over the grid nodes together with its support.
///
/// Fields produced by rasterizing a shape take only the values 0 and b_value.
/// Smooth contrasts (used for convergence studies) are built with from_values.
class ScattererField {
 public:
  /// Value b_value on every masked node, 0 elsewhere.
  static ScattererField piecewise_constant(const Grid2D& grid, const std::vector<bool>& inside,
                                           double b_value);
  static ScattererField from_values(const Grid2D& grid, std::vector<double> values);
  static ScattererField zero(const Grid2D& grid);

  const Grid2D& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::size_t>& support() const { return support_; }
  double operator[](std::size_t idx) const { return values_[idx]; }
  double support_fraction() const {
    return static_cast<double>(support_.size()) / static_cast<double>(values_.size());
  }

 private:
  ScattererField(const Grid2D& grid, std::vector<double> values);

  Grid2D grid_;
  std::vector<double> values_;
  std::vector<std::size_t> support_;
};

/// Complex wave amplitude over the grid nodes.
struct ComplexField {
  Grid2D grid;
  std::vector<std::complex<double>> values;

  const std::complex<double>& operator[](std::size_t idx) const { return values[idx]; }
  std::complex<double>& operator[](std::size_t idx) { return values[idx]; }
};

}  // namespace cloudscat
