#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cloudscat/geometry.hpp"

namespace cloudscat::geometry {

const char* to_string(ShapeStatus status) {
  switch (status) {
    case ShapeStatus::kValid: return "valid";
    case ShapeStatus::kEmpty: return "empty";
    case ShapeStatus::kNonManifold: return "non-manifold";
    case ShapeStatus::kDisconnected: return "disconnected";
    case ShapeStatus::kSelfIntersecting: return "self-intersecting";
  }
  return "unknown";
}

void validate(const PointCloud& cloud, const Box& domain) {
  if (cloud.points.size() < 4) throw std::invalid_argument("PointCloud: at least 4 points required");
  if (!(cloud.alpha > 0.0) || !std::isfinite(cloud.alpha)) {
    throw std::invalid_argument("PointCloud: alpha must be finite and > 0");
  }
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (!domain.contains(cloud.points[i])) {
      throw std::invalid_argument("PointCloud: point " + std::to_string(i) + " lies outside the domain");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (distance(cloud.points[i], cloud.points[j]) <= 1e-12) {
        throw std::invalid_argument("PointCloud: points " + std::to_string(j) + " and " +
                                    std::to_string(i) + " coincide");
      }
    }
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Range [lo, hi] of signed offsets t along the left normal of a->b for which
// the disc through a and b centred at midpoint + t n is empty. Bounded by the
// circumcentres of the incident triangles: the left one caps t from above,
// the right one from below.
struct EmptyDiscRange {
  double lo = -kInf;
  double hi = kInf;
};

std::vector<Edge> exposed_edges(const Triangulation& tri, double alpha) {
  const auto& v = tri.vertices;
  std::map<Edge, EmptyDiscRange> ranges;
  for (const auto& t : tri.triangles) {
    const Point2 cc = circumcenter(v[t[0]], v[t[1]], v[t[2]]);
    for (int e = 0; e < 3; ++e) {
      const int a = t[e];
      const int b = t[(e + 1) % 3];
      // Orient every edge from its lower to its higher index.
      const int lo = std::min(a, b);
      const int hi = std::max(a, b);
      const Point2 dir = v[hi] - v[lo];
      const Point2 normal{-dir.y / norm(dir), dir.x / norm(dir)};
      const Point2 mid = 0.5 * (v[lo] + v[hi]);
      const double offset = dot(cc - mid, normal);
      auto& range = ranges[{lo, hi}];
      // The triangle lies to the left of lo->hi exactly when (a, b) = (lo, hi).
      if (a == lo) {
        range.hi = std::min(range.hi, offset);
      } else {
        range.lo = std::max(range.lo, offset);
      }
    }
  }
  std::vector<Edge> out;
  for (const auto& [edge, range] : ranges) {
    const double half = 0.5 * distance(v[edge.first], v[edge.second]);
    if (alpha < half) continue;
    const double t = std::sqrt(alpha * alpha - half * half);
    const bool upper = range.lo <= t && t <= range.hi;
    const bool lower = range.lo <= -t && -t <= range.hi;
    if (upper || lower) out.push_back(edge);
  }
  return out;
}

bool segments_cross(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

AlphaShape alpha_shape(const Triangulation& tri, double alpha) {
  AlphaShape out;
  out.edges = exposed_edges(tri, alpha);
  if (out.edges.empty()) {
    out.status = ShapeStatus::kEmpty;
    return out;
  }
  const int m = static_cast<int>(tri.vertices.size());
  std::vector<std::vector<int>> adj(m);
  for (const auto& [a, b] : out.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  int start = -1;
  for (int i = 0; i < m; ++i) {
    if (adj[i].empty()) continue;
    if (adj[i].size() != 2) {
      out.status = ShapeStatus::kNonManifold;
      return out;
    }
    if (start < 0) start = i;
  }
  std::vector<int> cycle{start};
  int prev = start;
  int cur = std::min(adj[start][0], adj[start][1]);
  while (cur != start) {
    cycle.push_back(cur);
    const int next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
    prev = cur;
    cur = next;
  }
  if (cycle.size() != out.edges.size()) {
    out.status = ShapeStatus::kDisconnected;
    return out;
  }
  std::vector<Point2> ring;
  ring.reserve(cycle.size());
  for (int i : cycle) ring.push_back(tri.vertices[i]);
  for (std::size_t i = 0; i < ring.size(); ++i) {
    for (std::size_t j = i + 2; j < ring.size(); ++j) {
      if (i == 0 && j + 1 == ring.size()) continue;
      if (segments_cross(ring[i], ring[i + 1], ring[j], ring[(j + 1) % ring.size()])) {
        out.status = ShapeStatus::kSelfIntersecting;
        return out;
      }
    }
  }
  if (signed_area(ring) < 0.0) {
    std::reverse(cycle.begin() + 1, cycle.end());
    std::reverse(ring.begin() + 1, ring.end());
  }
  // Points off the cycle must be enclosed; an outlying point is a separate
  // component of the shape.
  std::vector<bool> on_cycle(m, false);
  for (int i : cycle) on_cycle[i] = true;
  for (int i = 0; i < m; ++i) {
    if (!on_cycle[i] && !contains(ring, tri.vertices[i])) {
      out.status = ShapeStatus::kDisconnected;
      return out;
    }
  }
  out.status = ShapeStatus::kValid;
  out.polygon = HullPolygon{std::move(cycle), std::move(ring)};
  return out;
}

AlphaShape alpha_shape(const PointCloud& cloud) {
  return alpha_shape(delaunay(cloud.points), cloud.alpha);
}

ShapeSummary build_shape(const PointCloud& cloud, int samples_per_vertex) {
  ShapeSummary out;
  try {
    out.triangulation = delaunay(cloud.points);
  } catch (const DegenerateGeometry&) {
    out.shape.status = ShapeStatus::kEmpty;
    return out;
  }
  out.radii = circumradius_range(out.triangulation);
  out.shape = alpha_shape(out.triangulation, cloud.alpha);
  if (!out.shape.valid() || out.shape.polygon->vertices.size() < 4) return out;
  const int per_vertex = samples_per_vertex > 0 ? samples_per_vertex : kSamplesPerVertex;
  const int n_samples = per_vertex * static_cast<int>(out.shape.polygon->vertices.size());
  out.spline = spline_hull(*out.shape.polygon, n_samples);
  if (out.spline) out.area = std::abs(signed_area(out.spline->samples()));
  return out;
}

}  // namespace cloudscat::geometry
