#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "cloudscat/geometry.hpp"

namespace cloudscat::geometry {

Point2 SplineBoundary::evaluate(double t) const {
  const double period = knots_.back();
  t = std::fmod(t, period);
  if (t < 0.0) t += period;
  const std::size_t v = control_.size();
  // Segment i covers [knots_[i], knots_[i+1]).
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t i = static_cast<std::size_t>(std::distance(knots_.begin(), it));
  i = i == 0 ? 0 : i - 1;
  if (i >= v) i = v - 1;
  const std::size_t j = (i + 1) % v;
  const double h = knots_[i + 1] - knots_[i];
  const double a = knots_[i + 1] - t;
  const double b = t - knots_[i];
  const auto blend = [&](double p0, double p1, double m0, double m1) {
    return m0 * a * a * a / (6.0 * h) + m1 * b * b * b / (6.0 * h) + (p0 / h - m0 * h / 6.0) * a +
           (p1 / h - m1 * h / 6.0) * b;
  };
  return {blend(control_[i].x, control_[j].x, second_[i].x, second_[j].x),
          blend(control_[i].y, control_[j].y, second_[i].y, second_[j].y)};
}

std::optional<SplineBoundary> spline_hull(const HullPolygon& polygon, int n_samples) {
  const auto& p = polygon.vertices;
  const int v = static_cast<int>(p.size());
  if (v < 4) {
    throw InvalidGeometry("spline_hull: at least 4 control points required, got " + std::to_string(v));
  }
  if (n_samples <= 0) n_samples = kSamplesPerVertex * v;

  SplineBoundary s;
  s.control_ = p;
  s.knots_.resize(v + 1);
  s.knots_[0] = 0.0;
  for (int i = 0; i < v; ++i) {
    const double chord = distance(p[i], p[(i + 1) % v]);
    if (!(chord > 0.0)) throw InvalidGeometry("spline_hull: repeated control point");
    s.knots_[i + 1] = s.knots_[i] + chord;
  }

  // Periodic C^2 conditions on the second derivatives M_i:
  // h_{i-1} M_{i-1} + 2 (h_{i-1} + h_i) M_i + h_i M_{i+1} = 6 (slope_i - slope_{i-1}).
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(v, v);
  Eigen::MatrixXd rhs(v, 2);
  for (int i = 0; i < v; ++i) {
    const int prev = (i + v - 1) % v;
    const int next = (i + 1) % v;
    const double hp = s.knots_[prev + 1] - s.knots_[prev];
    const double hi = s.knots_[i + 1] - s.knots_[i];
    a(i, prev) += hp;
    a(i, i) += 2.0 * (hp + hi);
    a(i, next) += hi;
    const Point2 slope_i = (1.0 / hi) * (p[next] - p[i]);
    const Point2 slope_p = (1.0 / hp) * (p[i] - p[prev]);
    rhs(i, 0) = 6.0 * (slope_i.x - slope_p.x);
    rhs(i, 1) = 6.0 * (slope_i.y - slope_p.y);
  }
  const Eigen::MatrixXd m = a.llt().solve(rhs);
  s.second_.resize(v);
  for (int i = 0; i < v; ++i) s.second_[i] = {m(i, 0), m(i, 1)};

  const double period = s.knots_.back();
  s.samples_.reserve(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    s.samples_.push_back(s.evaluate(period * static_cast<double>(k) / n_samples));
  }
  if (!is_simple(s.samples_)) return std::nullopt;
  return s;
}

}  // namespace cloudscat::geometry
