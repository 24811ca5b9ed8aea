#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cloudscat/bayes.hpp"

namespace cloudscat::bayes {

Curve kite_curve(double scale) {
  return [scale](double t) {
    return Point2{scale * 1.5 * std::sin(t), scale * (std::cos(t) + 0.65 * std::cos(2.0 * t) - 0.65)};
  };
}

std::vector<Point2> sample_curve(const Curve& curve, int samples) {
  if (samples < 3) throw ContractError("sample_curve: need at least 3 samples");
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) out.push_back(curve(2.0 * std::numbers::pi * i / samples));
  return out;
}

Box bounding_box(std::span<const Point2> points) {
  if (points.empty()) throw ContractError("bounding_box: no points");
  Box box{points.front(), points.front()};
  for (const auto& p : points) {
    box.lo = {std::min(box.lo.x, p.x), std::min(box.lo.y, p.y)};
    box.hi = {std::max(box.hi.x, p.x), std::max(box.hi.y, p.y)};
  }
  return box;
}

Observations synthesize(const Curve& true_shape, const ObservationDesign& design, const Grid2D& synth_grid,
                        const SynthesisOptions& options) {
  design.check();
  std::vector<std::size_t> nodes;
  for (const auto& p : design.points) {
    const long idx = synth_grid.find_node(p);
    if (idx < 0) throw ContractError("synthesize: observation point is not a node of the synthesis grid");
    nodes.push_back(static_cast<std::size_t>(idx));
  }
  const auto polyline = sample_curve(true_shape, options.curve_samples);
  const ScattererField field = geometry::rasterize(polyline, synth_grid, options.b_value);

  Observations obs;
  obs.directions = design.direction_count();
  obs.points = design.point_count();
  obs.data.assign(obs.directions * obs.points, cplx{});
  for (std::size_t i = 0; i < obs.directions; ++i) {
    const double k = design.wavenumbers[i];
    const auto incident = forward::incident_plane_wave(design.directions[i], k, synth_grid);
    const auto total = forward::solve_reference(field, k, incident, synth_grid, options.solver);
    for (std::size_t j = 0; j < obs.points; ++j) obs.value(i, j) = total[nodes[j]] - incident[nodes[j]];
  }
  if (!options.noise_free) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < obs.directions; ++i) {
      const double s = design.sigma(i);
      for (std::size_t j = 0; j < obs.points; ++j) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        obs.value(i, j) += cplx(s * re, s * im);
      }
    }
  }
  obs.meta = {options.seed,    design.sigma_low, design.sigma_high, design.zeta,       options.noise_free,
              "reference",     synth_grid.n(),   synth_grid.h(),    synth_grid.origin()};
  return obs;
}

}  // namespace cloudscat::bayes
