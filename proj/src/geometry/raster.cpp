#include <algorithm>
#include <cmath>
#include <numeric>

#include "cloudscat/geometry.hpp"

namespace cloudscat::geometry {
namespace {

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return (d1 == 0 && on_segment(q1, q2, p1)) || (d2 == 0 && on_segment(q1, q2, p2)) ||
         (d3 == 0 && on_segment(p1, p2, q1)) || (d4 == 0 && on_segment(p1, p2, q2));
}

}  // namespace

bool is_simple(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  const auto at = [&](std::size_t i) { return ring[i % n]; };
  // Adjacent edges may only share their common vertex.
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = at(i), b = at(i + 1), c = at(i + 2);
    if (a == b) return false;
    if (orient(a, b, c) == 0.0 && dot(b - a, c - b) < 0.0) return false;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto xmin = [&](std::size_t i) { return std::min(at(i).x, at(i + 1).x); };
  const auto xmax = [&](std::size_t i) { return std::max(at(i).x, at(i + 1).x); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xmin(a) < xmin(b); });
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t i = order[u];
    const double reach = xmax(i);
    for (std::size_t w = u + 1; w < n && xmin(order[w]) <= reach; ++w) {
      const std::size_t j = order[w];
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap == 1 || gap == n - 1) continue;
      if (segments_touch(at(i), at(i + 1), at(j), at(j + 1))) return false;
    }
  }
  return true;
}

bool contains(std::span<const Point2> ring, Point2 p) {
  const std::size_t n = ring.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = ring[j];
    const Point2 b = ring[i];
    if (orient(a, b, p) == 0.0 && on_segment(a, b, p)) return true;
    if ((a.y <= p.y) != (b.y <= p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x > p.x) inside = !inside;
    }
  }
  return inside;
}

std::vector<bool> inside_mask(std::span<const Point2> ring, const Grid2D& grid) {
  std::vector<bool> mask(grid.size(), false);
  const std::size_t n = ring.size();
  if (n < 3) return mask;
  double ymin = ring[0].y, ymax = ring[0].y;
  for (const auto& p : ring) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  std::vector<double> crossings;
  std::vector<std::pair<double, double>> on_boundary;  // closed x-intervals on the row
  for (int r = 0; r <= grid.n(); ++r) {
    const double y = grid.node(0, r).y;
    if (y < ymin || y > ymax) continue;
    crossings.clear();
    on_boundary.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point2 a = ring[j];
      const Point2 b = ring[i];
      if (std::min(a.y, b.y) > y || std::max(a.y, b.y) < y) continue;
      if (a.y == b.y) {
        on_boundary.emplace_back(std::min(a.x, b.x), std::max(a.x, b.x));
        continue;
      }
      const double x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
      on_boundary.emplace_back(x, x);
      if ((a.y <= y) != (b.y <= y)) crossings.push_back(x);
    }
    std::sort(crossings.begin(), crossings.end());
    for (int c = 0; c <= grid.n(); ++c) {
      const double x = grid.node(c, r).x;
      const auto right = crossings.end() - std::upper_bound(crossings.begin(), crossings.end(), x);
      bool in = (right % 2) == 1;
      if (!in) {
        for (const auto& [lo, hi] : on_boundary) {
          if (lo <= x && x <= hi) {
            in = true;
            break;
          }
        }
      }
      mask[grid.index(c, r)] = in;
    }
  }
  return mask;
}

ScattererField rasterize(std::span<const Point2> ring, const Grid2D& grid, double b_value) {
  if (b_value == 0.0) return ScattererField::zero(grid);
  return ScattererField::piecewise_constant(grid, inside_mask(ring, grid), b_value);
}

ScattererField rasterize(const SplineBoundary& boundary, const Grid2D& grid, double b_value) {
  return rasterize(boundary.samples(), grid, b_value);
}

double signed_area(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  long double acc = 0.0L;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    acc += static_cast<long double>(ring[j].x) * ring[i].y - static_cast<long double>(ring[i].x) * ring[j].y;
  }
  return static_cast<double>(acc / 2.0L);
}

double polygon_area(std::span<const Point2> ring) {
  if (!is_simple(ring)) throw InvalidGeometry("polygon_area: polyline is not simple");
  return std::abs(signed_area(ring));
}

double polygon_area(const SplineBoundary& boundary) { return polygon_area(boundary.samples()); }

}  // namespace cloudscat::geometry
