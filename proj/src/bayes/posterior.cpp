#include <cmath>
#include <numbers>

#include "cloudscat/bayes.hpp"

namespace cloudscat::bayes {

void PriorSpec::check() const {
  if (!(shape > 0.0) || !std::isfinite(shape) || !(rate > 0.0) || !std::isfinite(rate)) {
    throw ContractError("PriorSpec: gamma shape and rate must be finite and > 0");
  }
  if (!(domain.lo.x < domain.hi.x) || !(domain.lo.y < domain.hi.y)) {
    throw ContractError("PriorSpec: empty domain");
  }
}

double gamma_log_pdf(double x, double shape, double rate) {
  if (!(x > 0.0) || !std::isfinite(x)) return kImpossible;
  return (shape - 1.0) * std::log(x) - rate * x + shape * std::log(rate) - std::lgamma(shape);
}

double log_prior(const Theta& theta, const PriorSpec& prior) {
  for (const auto& p : theta.cloud.points) {
    if (!prior.domain.contains(p)) return kImpossible;
  }
  if (!(theta.cloud.alpha > 0.0) || theta.cloud.alpha > prior.alpha_upper()) return kImpossible;
  return gamma_log_pdf(theta.b, prior.shape, prior.rate);
}

ForwardModel::ForwardModel(const Grid2D& grid, ObservationDesign design, double c1)
    : grid_(grid), design_(std::move(design)) {
  design_.check();
  nodes_.reserve(design_.point_count());
  for (const auto& p : design_.points) {
    const long idx = grid_.find_node(p);
    if (idx < 0) throw ContractError("ForwardModel: observation point is not a grid node");
    nodes_.push_back(static_cast<std::size_t>(idx));
  }
  for (std::size_t i = 0; i < design_.direction_count(); ++i) {
    const double k = design_.wavenumbers[i];
    if (!weights_.contains(k)) weights_.emplace(k, forward::QuadratureWeights(k, grid_, c1));
    incident_.push_back(forward::incident_plane_wave(design_.directions[i], k, grid_));
  }
}

std::vector<cplx> ForwardModel::predict(const ScattererField& field) const {
  if (!(field.grid() == grid_)) throw ContractError("ForwardModel::predict: field is on another grid");
  const std::size_t np = nodes_.size();
  std::vector<cplx> out(design_.direction_count() * np, cplx{});
  if (field.support().empty()) return out;
  for (const auto& [k, weights] : weights_) {
    const forward::DirectSolver solver(field, weights);
    for (std::size_t i = 0; i < design_.direction_count(); ++i) {
      if (design_.wavenumbers[i] != k) continue;
      const auto total = solver.solve_at(incident_[i], nodes_);
      for (std::size_t j = 0; j < np; ++j) out[i * np + j] = total[j] - incident_[i][nodes_[j]];
    }
  }
  return out;
}

std::vector<cplx> forward_map(const geometry::ShapeSummary& shape, double b, const ForwardModel& model) {
  if (!shape.valid()) throw InvalidState("forward_map: hull is not a valid simple polygon");
  return model.predict(geometry::rasterize(*shape.spline, model.grid(), b));
}

std::vector<cplx> forward_map(const Theta& theta, const ForwardModel& model) {
  return forward_map(geometry::build_shape(theta.cloud), theta.b, model);
}

double log_likelihood(const std::vector<cplx>& predicted, const Observations& obs,
                      const ObservationDesign& design) {
  if (obs.directions != design.direction_count() || obs.points != design.point_count() ||
      obs.data.size() != predicted.size()) {
    throw ContractError("log_likelihood: dimensions of data, prediction and design differ");
  }
  double misfit_low = 0.0, misfit_high = 0.0;
  std::size_t scalars_low = 0, scalars_high = 0;
  for (std::size_t i = 0; i < obs.directions; ++i) {
    double misfit = 0.0;
    for (std::size_t j = 0; j < obs.points; ++j) misfit += std::norm(obs.value(i, j) - predicted[i * obs.points + j]);
    if (design.is_low(i)) {
      misfit_low += misfit;
      scalars_low += 2 * obs.points;
    } else {
      misfit_high += misfit;
      scalars_high += 2 * obs.points;
    }
  }
  const auto group = [](double misfit, std::size_t m, double sigma) {
    if (m == 0) return 0.0;
    const double s2 = sigma * sigma;
    return -0.5 * static_cast<double>(m) * std::log(2.0 * std::numbers::pi * s2) - 0.5 * misfit / s2;
  };
  return group(misfit_low, scalars_low, design.sigma_low) + group(misfit_high, scalars_high, design.sigma_high);
}

GaussianLikelihood::GaussianLikelihood(std::shared_ptr<const ForwardModel> model, Observations obs)
    : model_(std::move(model)), obs_(std::move(obs)) {
  const auto& d = model_->design();
  if (obs_.directions != d.direction_count() || obs_.points != d.point_count() ||
      obs_.data.size() != obs_.directions * obs_.points) {
    throw ContractError("GaussianLikelihood: observations do not match the design");
  }
}

double GaussianLikelihood::operator()(const geometry::ShapeSummary& shape, double b) const {
  return log_likelihood(forward_map(shape, b, *model_), obs_, model_->design());
}

double energy(const Theta& theta, const geometry::ShapeSummary& shape, const Likelihood& likelihood,
              const PriorSpec& prior) {
  const double lp = log_prior(theta, prior);
  if (lp == kImpossible || !shape.valid()) return kInfiniteEnergy;
  return -likelihood(shape, theta.b) - gamma_log_pdf(theta.b, prior.shape, prior.rate);
}

double energy(const Theta& theta, const Likelihood& likelihood, const PriorSpec& prior) {
  if (log_prior(theta, prior) == kImpossible) return kInfiniteEnergy;
  return energy(theta, geometry::build_shape(theta.cloud), likelihood, prior);
}

}  // namespace cloudscat::bayes
