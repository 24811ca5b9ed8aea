#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cloudscat/geometry.hpp"

namespace cloudscat::geometry {

double orient(Point2 a, Point2 b, Point2 c) {
  using ld = long double;
  const ld v = (static_cast<ld>(b.x) - a.x) * (static_cast<ld>(c.y) - a.y) -
               (static_cast<ld>(b.y) - a.y) * (static_cast<ld>(c.x) - a.x);
  return static_cast<double>(v);
}

double incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  using ld = long double;
  const ld adx = static_cast<ld>(a.x) - d.x, ady = static_cast<ld>(a.y) - d.y;
  const ld bdx = static_cast<ld>(b.x) - d.x, bdy = static_cast<ld>(b.y) - d.y;
  const ld cdx = static_cast<ld>(c.x) - d.x, cdy = static_cast<ld>(c.y) - d.y;
  const ld alift = adx * adx + ady * ady;
  const ld blift = bdx * bdx + bdy * bdy;
  const ld clift = cdx * cdx + cdy * cdy;
  const ld det = alift * (bdx * cdy - bdy * cdx) - blift * (adx * cdy - ady * cdx) +
                 clift * (adx * bdy - ady * bdx);
  return static_cast<double>(det);
}

double circumradius(Point2 a, Point2 b, Point2 c) {
  const double twice_area = std::abs(orient(a, b, c));
  return distance(a, b) * distance(b, c) * distance(c, a) / (2.0 * twice_area);
}

Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
  const Point2 ab = b - a;
  const Point2 ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = dot(ab, ab);
  const double ac2 = dot(ac, ac);
  return {a.x + (ac.y * ab2 - ab.y * ac2) / d, a.y + (ab.x * ac2 - ac.x * ab2) / d};
}

std::vector<Edge> Triangulation::edges() const {
  std::vector<Edge> out;
  out.reserve(triangles.size() * 3);
  for (const auto& t : triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e];
      const int b = t[(e + 1) % 3];
      out.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

class Builder {
 public:
  explicit Builder(std::span<const Point2> pts) : pts_(pts) {}

  std::vector<Triangle> run() {
    const int m = static_cast<int>(pts_.size());
    if (m < 3) throw DegenerateGeometry("delaunay: at least 3 points are required");
    int third = -1;
    for (int k = 2; k < m; ++k) {
      if (orient(pts_[0], pts_[1], pts_[k]) != 0.0) {
        third = k;
        break;
      }
    }
    if (third < 0) throw DegenerateGeometry("delaunay: all points are collinear");
    if (orient(pts_[0], pts_[1], pts_[third]) > 0.0) {
      tris_.push_back({0, 1, third});
    } else {
      tris_.push_back({0, third, 1});
    }
    for (int k = 2; k < m; ++k) {
      if (k == third) continue;
      insert(k);
      legalize();
    }
    return std::move(tris_);
  }

 private:
  void insert(int p) {
    const Point2 q = pts_[p];
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      const auto [a, b, c] = tris_[t];
      const double o[3] = {orient(pts_[b], pts_[c], q), orient(pts_[c], pts_[a], q),
                           orient(pts_[a], pts_[b], q)};
      if (o[0] < 0.0 || o[1] < 0.0 || o[2] < 0.0) continue;
      const int zeros = (o[0] == 0.0) + (o[1] == 0.0) + (o[2] == 0.0);
      if (zeros >= 2) throw DegenerateGeometry("delaunay: duplicate point");
      if (zeros == 0) {
        tris_[t] = {a, b, p};
        tris_.push_back({b, c, p});
        tris_.push_back({c, a, p});
        return;
      }
      // On the edge opposite the vertex whose orientation vanished.
      const int opp = o[0] == 0.0 ? 0 : (o[1] == 0.0 ? 1 : 2);
      const int u = tris_[t][(opp + 1) % 3];
      const int v = tris_[t][(opp + 2) % 3];
      const int w = tris_[t][opp];
      tris_[t] = {w, u, p};
      tris_.push_back({v, w, p});
      // The neighbour across (u, v) holds the directed edge (v, u).
      for (std::size_t s = 0; s < tris_.size(); ++s) {
        if (s == t) continue;
        for (int e = 0; e < 3; ++e) {
          if (tris_[s][e] == v && tris_[s][(e + 1) % 3] == u) {
            const int x = tris_[s][(e + 2) % 3];
            tris_[s] = {v, p, x};
            tris_.push_back({p, u, x});
            return;
          }
        }
      }
      return;
    }
    // Outside the current hull: attach to every boundary edge visible from q.
    std::map<Edge, int> directed;
    for (const auto& t : tris_) {
      for (int e = 0; e < 3; ++e) ++directed[{t[e], t[(e + 1) % 3]}];
    }
    std::vector<Triangle> added;
    for (const auto& [edge, count] : directed) {
      const auto [a, b] = edge;
      if (directed.count({b, a}) != 0) continue;
      if (orient(pts_[a], pts_[b], q) < 0.0) added.push_back({b, a, p});
    }
    tris_.insert(tris_.end(), added.begin(), added.end());
  }

  // Lawson flips until every interior edge is locally Delaunay.
  void legalize() {
    const std::size_t cap = 64 * pts_.size() * pts_.size() + 64;
    for (std::size_t iter = 0; iter < cap; ++iter) {
      if (!flip_one()) return;
    }
    throw DegenerateGeometry("delaunay: edge flipping did not terminate");
  }

  bool flip_one() {
    std::map<Edge, std::pair<int, int>> owner;  // directed edge -> (triangle, slot)
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      for (int e = 0; e < 3; ++e) owner[{tris_[t][e], tris_[t][(e + 1) % 3]}] = {t, e};
    }
    for (const auto& [edge, where] : owner) {
      const auto [a, b] = edge;
      if (a > b) continue;
      auto twin = owner.find({b, a});
      if (twin == owner.end()) continue;
      const auto [t, e] = where;
      const auto [s, f] = twin->second;
      const int c = tris_[t][(e + 2) % 3];
      const int d = tris_[s][(f + 2) % 3];
      const double in = incircle(pts_[a], pts_[b], pts_[c], pts_[d]);
      bool flip = in > 0.0;
      if (in == 0.0) flip = std::min(c, d) < std::min(a, b);
      if (!flip) continue;
      // The new diagonal must lie inside the quadrilateral.
      if (orient(pts_[a], pts_[d], pts_[c]) <= 0.0 || orient(pts_[d], pts_[b], pts_[c]) <= 0.0) {
        continue;
      }
      tris_[t] = {a, d, c};
      tris_[s] = {d, b, c};
      return true;
    }
    return false;
  }

  std::span<const Point2> pts_;
  std::vector<Triangle> tris_;
};

}  // namespace

Triangulation delaunay(std::span<const Point2> points) {
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw DegenerateGeometry("delaunay: non-finite coordinate");
    }
  }
  Triangulation out;
  out.vertices.assign(points.begin(), points.end());
  out.triangles = Builder(points).run();
  out.circumradii.reserve(out.triangles.size());
  for (const auto& t : out.triangles) {
    out.circumradii.push_back(circumradius(points[t[0]], points[t[1]], points[t[2]]));
  }
  return out;
}

CircumradiusRange circumradius_range(const Triangulation& tri) {
  if (tri.circumradii.empty()) throw DegenerateGeometry("circumradius_range: no triangles");
  const auto [lo, hi] = std::minmax_element(tri.circumradii.begin(), tri.circumradii.end());
  return {*lo, *hi};
}

}  // namespace cloudscat::geometry
