#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cloudscat/forward.hpp"
#include "cloudscat/geometry.hpp"
#include "cloudscat/grid.hpp"

// Observation model, priors and posterior energy for the shape/contrast
// inverse problem. The unknown is theta = (Q, alpha, b): a point cloud with its
// alpha parameter, and the constant contrast inside the resulting hull.

namespace cloudscat::bayes {

using cplx = std::complex<double>;

inline constexpr double kLowWavenumber = 1.0;
inline constexpr double kHighWavenumber = 5.0;
inline constexpr int kDirectionCount = 8;
inline constexpr double kImpossible = -std::numeric_limits<double>::infinity();

/// Mismatched dimensions or nodes between data, design and grid.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The forward map was asked for a theta whose hull is not a valid polygon.
class InvalidState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// d_i = (cos(2 pi i / count + zeta), sin(2 pi i / count + zeta)), i = 1..count.
std::vector<Point2> incident_directions(double zeta, int count = kDirectionCount);

/// Every `stride`-th node in both grid directions that lies outside `exclude`.
std::vector<Point2> default_observation_points(const Grid2D& grid, const Box& exclude, int stride = 4);

struct ObservationDesign {
  std::vector<Point2> points;
  std::vector<Point2> directions;
  std::vector<double> wavenumbers;  // one per direction
  double zeta = 0.0;
  double k_low = kLowWavenumber;
  double k_high = kHighWavenumber;
  double sigma_low = 0.012;
  double sigma_high = 0.012;

  /// Eight directions rotated by zeta; even i (1-based) get k_high, odd get k_low.
  static ObservationDesign standard(std::vector<Point2> points, double zeta, double sigma_low,
                                    double sigma_high);

  std::size_t direction_count() const { return directions.size(); }
  std::size_t point_count() const { return points.size(); }
  bool is_low(std::size_t direction) const { return wavenumbers[direction] == k_low; }
  double sigma(std::size_t direction) const { return is_low(direction) ? sigma_low : sigma_high; }

  /// Throws ContractError on inconsistent sizes, non-unit directions,
  /// non-positive sigma or wavenumbers outside {k_low, k_high}.
  void check() const;
};

struct ObservationMeta {
  std::uint64_t seed = 0;
  double sigma_low = 0.0;
  double sigma_high = 0.0;
  double zeta = 0.0;
  bool noise_free = false;
  std::string solver;  // "reference" or "direct"
  int grid_n = 0;
  double grid_h = 0.0;
  Point2 grid_origin;
};

/// Scattered-field samples, direction-major: value(i, j) is direction i at point j.
struct Observations {
  std::size_t directions = 0;
  std::size_t points = 0;
  std::vector<cplx> data;
  ObservationMeta meta;

  const cplx& value(std::size_t i, std::size_t j) const { return data[i * points + j]; }
  cplx& value(std::size_t i, std::size_t j) { return data[i * points + j]; }
};

/// CSV rows `direction_index,wavenumber,x1,x2,re,im` (direction_index 1-based).
void write_observations_csv(std::ostream& out, const Observations& obs, const ObservationDesign& design);
/// Reads the CSV and checks every row against the design (wavenumber and point
/// coordinates within 1e-12); throws ContractError on mismatch.
Observations read_observations_csv(std::istream& in, const ObservationDesign& design);
void write_meta(std::ostream& out, const ObservationMeta& meta);
ObservationMeta read_meta(std::istream& in);

struct PriorSpec {
  double shape = 2.0;   // k~
  double rate = 0.05;   // lambda~
  Box domain{{-0.4, -0.4}, {0.4, 0.4}};
  /// Upper end of the uniform alpha support (0, alpha_max]; <= 0 means diag(domain).
  double alpha_max = 0.0;

  double alpha_upper() const { return alpha_max > 0.0 ? alpha_max : domain.diagonal(); }
  void check() const;
};

struct Theta {
  geometry::PointCloud cloud;
  double b = 0.0;
};

/// Gamma(shape, rate) log density; kImpossible for x <= 0.
double gamma_log_pdf(double x, double shape, double rate);

/// log pi(b) plus the uniform-support indicators for Q and alpha.
double log_prior(const Theta& theta, const PriorSpec& prior);

/// Per-frequency-group data and solver plumbing for the forward map.
///
/// Holds one set of quadrature weights per distinct wavenumber and the incident
/// fields of every direction; a prediction factorizes the reduced system once
/// per wavenumber and reuses it for all directions sharing that wavenumber.
class ForwardModel {
 public:
  /// Throws ContractError if a design point is not a node of `grid`.
  ForwardModel(const Grid2D& grid, ObservationDesign design, double c1 = forward::kC1);

  const Grid2D& grid() const { return grid_; }
  const ObservationDesign& design() const { return design_; }
  const std::vector<std::size_t>& nodes() const { return nodes_; }

  /// Scattered field u - u^i at the observation points, direction-major.
  std::vector<cplx> predict(const ScattererField& field) const;

 private:
  Grid2D grid_;
  ObservationDesign design_;
  std::vector<std::size_t> nodes_;
  std::map<double, forward::QuadratureWeights> weights_;
  std::vector<ComplexField> incident_;
};

/// Rasterize theta's spline hull onto the model grid and predict.
/// Throws InvalidState when the hull is not a valid simple polygon.
std::vector<cplx> forward_map(const Theta& theta, const ForwardModel& model);
std::vector<cplx> forward_map(const geometry::ShapeSummary& shape, double b, const ForwardModel& model);

/// Sum over frequency groups g of -(M_g/2) ln(2 pi sigma_g^2) - (1/2) sum |r|^2 / sigma_g^2,
/// with M_g the number of real scalars (two per complex sample) in group g.
double log_likelihood(const std::vector<cplx>& predicted, const Observations& obs,
                      const ObservationDesign& design);

/// log L(d | theta) as a function of an already-built shape; lets the sampler
/// swap the data term (a constant likelihood samples the prior).
class Likelihood {
 public:
  virtual ~Likelihood() = default;
  virtual double operator()(const geometry::ShapeSummary& shape, double b) const = 0;
};

class GaussianLikelihood final : public Likelihood {
 public:
  GaussianLikelihood(std::shared_ptr<const ForwardModel> model, Observations obs);
  double operator()(const geometry::ShapeSummary& shape, double b) const override;

 private:
  std::shared_ptr<const ForwardModel> model_;
  Observations obs_;
};

class ConstantLikelihood final : public Likelihood {
 public:
  double operator()(const geometry::ShapeSummary&, double) const override { return 0.0; }
};

inline constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

/// -log L - log pi(b); +inf for impossible priors or an invalid hull.
double energy(const Theta& theta, const geometry::ShapeSummary& shape, const Likelihood& likelihood,
              const PriorSpec& prior);
double energy(const Theta& theta, const Likelihood& likelihood, const PriorSpec& prior);

/// Closed curve t -> point, t in [0, 2 pi).
using Curve = std::function<Point2(double)>;

/// (1.5 sin t, cos t + 0.65 cos 2t - 0.65) scaled by `scale`.
Curve kite_curve(double scale);
inline double kite_area(double scale) { return 1.5 * 3.14159265358979323846 * scale * scale; }
/// `samples` points at t = 2 pi i / samples.
std::vector<Point2> sample_curve(const Curve& curve, int samples);
Box bounding_box(std::span<const Point2> points);

struct SynthesisOptions {
  double b_value = 25.0;
  std::uint64_t seed = 1;
  bool noise_free = false;
  int curve_samples = 10000;
  forward::IterativeOptions solver{};
};

/// Reference-solver field on `synth_grid` at the observation points plus
/// independent N(0, sigma^2) noise on real and imaginary parts.
/// Throws ContractError when an observation point is not a node of synth_grid.
Observations synthesize(const Curve& true_shape, const ObservationDesign& design, const Grid2D& synth_grid,
                        const SynthesisOptions& options);

}  // namespace cloudscat::bayes
