#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cloudscat/grid.hpp"

// Point-cloud shape representation: Delaunay triangulation, alpha-shape,
// interpolating periodic cubic spline hull, rasterization and area.

namespace cloudscat::geometry {

class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The unknown shape: m control points and the alpha-shape parameter.
struct PointCloud {
  std::vector<Point2> points;
  double alpha = 0.0;
};

/// Throws std::invalid_argument when m < 4, alpha <= 0, a point leaves
/// `domain`, or two points are closer than 1e-12.
void validate(const PointCloud& cloud, const Box& domain);

/// Orientation predicate: > 0 when a, b, c turn counter-clockwise.
double orient(Point2 a, Point2 b, Point2 c);

/// > 0 when d lies strictly inside the circumcircle of the CCW triangle abc.
double incircle(Point2 a, Point2 b, Point2 c, Point2 d);

double circumradius(Point2 a, Point2 b, Point2 c);
Point2 circumcenter(Point2 a, Point2 b, Point2 c);

using Triangle = std::array<int, 3>;
using Edge = std::pair<int, int>;  // first < second

struct Triangulation {
  std::vector<Point2> vertices;
  std::vector<Triangle> triangles;  // counter-clockwise vertex indices
  std::vector<double> circumradii;  // one per triangle

  /// Undirected edges, each once, sorted.
  std::vector<Edge> edges() const;
};

/// Delaunay triangulation by incremental insertion with Lawson flips.
/// Cocircular ties are broken towards the diagonal holding the lowest vertex
/// index, so the output is a deterministic function of the input order.
/// Throws DegenerateGeometry for m < 3 or all-collinear input.
Triangulation delaunay(std::span<const Point2> points);

struct CircumradiusRange {
  double r_min;
  double r_max;
};

CircumradiusRange circumradius_range(const Triangulation& tri);

/// Simple closed polygon through a subset of the cloud, counter-clockwise,
/// starting at its lowest cloud index.
struct HullPolygon {
  std::vector<int> indices;
  std::vector<Point2> vertices;
};

enum class ShapeStatus { kValid, kEmpty, kNonManifold, kDisconnected, kSelfIntersecting };

const char* to_string(ShapeStatus status);

struct AlphaShape {
  std::vector<Edge> edges;  // the alpha-exposed edges
  ShapeStatus status = ShapeStatus::kEmpty;
  std::optional<HullPolygon> polygon;  // present iff status == kValid

  bool valid() const { return status == ShapeStatus::kValid; }
};

/// Alpha-exposed edges: an edge belongs to the shape iff some open disc of
/// radius alpha with both endpoints on its boundary holds no other point.
/// The shape is valid iff those edges form one simple cycle and every other
/// cloud point lies inside it.
AlphaShape alpha_shape(const Triangulation& tri, double alpha);
AlphaShape alpha_shape(const PointCloud& cloud);

/// Closed C^2 cubic spline through the polygon vertices in cyclic order,
/// parameterized by cumulative chord length. This is the interpolating cubic
/// B-spline on chordal knots written in its piecewise-polynomial form.
class SplineBoundary {
 public:
  const std::vector<Point2>& control_points() const { return control_; }
  /// Knot parameters t_0 = 0 < ... < t_V = period (the closing knot included).
  const std::vector<double>& knots() const { return knots_; }
  double period() const { return knots_.back(); }
  /// n_s samples at uniform parameter spacing; the closing segment is implicit.
  const std::vector<Point2>& samples() const { return samples_; }

  Point2 evaluate(double t) const;

 private:
  friend std::optional<SplineBoundary> spline_hull(const HullPolygon&, int);
  std::vector<Point2> control_;
  std::vector<double> knots_;
  std::vector<Point2> second_;  // second derivatives at the knots
  std::vector<Point2> samples_;
};

inline constexpr int kSamplesPerVertex = 64;

/// Throws InvalidGeometry for fewer than 4 vertices. Returns nullopt when the
/// sampled polyline self-intersects. n_samples <= 0 selects 64 per vertex.
std::optional<SplineBoundary> spline_hull(const HullPolygon& polygon, int n_samples = 0);

/// True when no two non-adjacent edges of the closed polyline touch.
bool is_simple(std::span<const Point2> closed_polyline);

/// Even-odd containment; points on the boundary count as inside.
bool contains(std::span<const Point2> closed_polyline, Point2 p);

/// Inside mask over the grid nodes (even-odd rule, boundary ties inside).
std::vector<bool> inside_mask(std::span<const Point2> closed_polyline, const Grid2D& grid);

ScattererField rasterize(std::span<const Point2> closed_polyline, const Grid2D& grid, double b_value);
ScattererField rasterize(const SplineBoundary& boundary, const Grid2D& grid, double b_value);

/// Signed shoelace area of a closed polyline (positive for CCW).
double signed_area(std::span<const Point2> closed_polyline);

/// |shoelace| of the sampled spline; throws InvalidGeometry if not simple.
double polygon_area(const SplineBoundary& boundary);
double polygon_area(std::span<const Point2> closed_polyline);

/// Full shape pipeline for one cloud, as consumed by the sampler.
struct ShapeSummary {
  Triangulation triangulation;
  CircumradiusRange radii{0.0, 0.0};
  AlphaShape shape;
  std::optional<SplineBoundary> spline;
  double area = 0.0;

  bool valid() const { return shape.valid() && spline.has_value(); }
};

/// Never throws for geometric failures; they surface as !valid().
/// `samples_per_vertex` <= 0 selects kSamplesPerVertex.
ShapeSummary build_shape(const PointCloud& cloud, int samples_per_vertex = 0);

}  // namespace cloudscat::geometry
