#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cloudscat/mcmc.hpp"

namespace cloudscat::mcmc {

const char* to_string(Move move) {
  switch (move) {
    case Move::kPoint: return "point";
    case Move::kTranslate: return "translate";
    case Move::kContrast: return "b";
    case Move::kAlpha: return "alpha";
  }
  return "?";
}

const char* to_string(AcceptanceMode mode) {
  return mode == AcceptanceMode::kExactMH ? "exact-mh" : "paper-literal";
}

AcceptanceMode parse_mode(const std::string& text) {
  if (text == "exact-mh") return AcceptanceMode::kExactMH;
  if (text == "paper-literal") return AcceptanceMode::kPaperLiteral;
  throw std::invalid_argument("unknown acceptance mode '" + text + "' (expected exact-mh or paper-literal)");
}

void KernelConfig::validate() const {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("KernelConfig: move weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("KernelConfig: move weights must sum to 1");
  if (t_max < 1) throw std::invalid_argument("KernelConfig: t_max must be >= 1");
  if (burn_in < 0 || burn_in >= t_max) throw std::invalid_argument("KernelConfig: burn_in must lie in [0, t_max)");
  if (snapshot_period < 1) throw std::invalid_argument("KernelConfig: snapshot_period must be >= 1");
  if (cloud_size < 4) throw std::invalid_argument("KernelConfig: cloud_size must be >= 4");
  if (init_attempts < 1) throw std::invalid_argument("KernelConfig: init_attempts must be >= 1");
}

double mean_pairwise_distance(const std::vector<Point2>& points, int exclude) {
  double sum = 0.0;
  long pairs = 0;
  const int m = static_cast<int>(points.size());
  for (int i = 0; i < m; ++i) {
    if (i == exclude) continue;
    for (int j = i + 1; j < m; ++j) {
      if (j == exclude) continue;
      sum += distance(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
      ++pairs;
    }
  }
  if (pairs == 0) throw std::invalid_argument("mean_pairwise_distance: fewer than two points");
  return sum / static_cast<double>(pairs);
}

namespace {
// Symmetric increment on (-d, d), written so that scaling d scales the draw.
double symmetric(Rng& rng, double d) { return d * (2.0 * rng.uniform01() - 1.0); }
}  // namespace

Proposal propose_point_move(const ChainState& state, Rng& rng) {
  Proposal p{state.theta, 0.0};
  auto& pts = p.candidate.cloud.points;
  if (pts.size() < 3) throw std::invalid_argument("propose_point_move: need at least 3 points");
  const std::size_t k = rng.index(pts.size());
  const double d = mean_pairwise_distance(pts, static_cast<int>(k));
  const double dx = symmetric(rng, d);
  const double dy = symmetric(rng, d);
  pts[k] = pts[k] + Point2{dx, dy};
  return p;
}

Proposal propose_translate(const ChainState& state, Rng& rng) {
  Proposal p{state.theta, 0.0};
  auto& pts = p.candidate.cloud.points;
  const double d = mean_pairwise_distance(pts);
  const Point2 u{symmetric(rng, d), symmetric(rng, d)};
  for (auto& q : pts) q = q + u;
  return p;
}

Proposal propose_b(const ChainState& state, Rng& rng, const bayes::PriorSpec& prior) {
  Proposal p{state.theta, 0.0};
  p.candidate.b = rng.gamma(prior.shape, prior.rate);
  p.log_hastings = bayes::gamma_log_pdf(state.theta.b, prior.shape, prior.rate) -
                   bayes::gamma_log_pdf(p.candidate.b, prior.shape, prior.rate);
  return p;
}

Proposal propose_alpha(const ChainState& state, Rng& rng, AcceptanceMode mode) {
  Proposal p{state.theta, 0.0};
  const double r_min = state.shape.radii.r_min;
  const double r_max = state.shape.radii.r_max;
  const double alpha = state.theta.cloud.alpha;
  const double alpha_new = 0.5 * alpha + 0.5 * (r_min + (r_max - r_min) * rng.uniform01());
  p.candidate.cloud.alpha = alpha_new;
  if (mode == AcceptanceMode::kExactMH) {
    // Reverse move exists iff alpha = alpha'/2 + U'/2 for some U' in [r_min, r_max].
    const double back = 2.0 * alpha - alpha_new;
    if (back < r_min || back > r_max) p.log_hastings = -std::numeric_limits<double>::infinity();
  }
  return p;
}

ChainState Target::evaluate(const bayes::Theta& theta) const {
  ChainState s;
  s.theta = theta;
  if (bayes::log_prior(theta, prior_) == bayes::kImpossible) return s;
  s.shape = geometry::build_shape(theta.cloud, samples_per_vertex_);
  if (!s.shape.valid()) return s;
  s.area = s.shape.area;
  s.energy = bayes::energy(theta, s.shape, likelihood_, prior_);
  return s;
}

ChainState Target::with_contrast(const ChainState& current, double b) const {
  ChainState s = current;
  s.theta.b = b;
  if (bayes::log_prior(s.theta, prior_) == bayes::kImpossible) {
    s.energy = bayes::kInfiniteEnergy;
    return s;
  }
  s.energy = bayes::energy(s.theta, s.shape, likelihood_, prior_);
  return s;
}

StepResult mh_step(ChainState& state, const Target& target, const KernelConfig& config, Rng& rng) {
  StepResult result;
  const double pick = rng.uniform01();
  double cumulative = 0.0;
  int move = kMoveCount - 1;
  for (int i = 0; i < kMoveCount; ++i) {
    cumulative += config.weights[static_cast<std::size_t>(i)];
    if (pick < cumulative) {
      move = i;
      break;
    }
  }
  // Guard against a zero-weight tail absorbing the rounding remainder.
  while (config.weights[static_cast<std::size_t>(move)] == 0.0 && move > 0) --move;
  result.move = static_cast<Move>(move);

  Proposal p;
  switch (result.move) {
    case Move::kPoint: p = propose_point_move(state, rng); break;
    case Move::kTranslate: p = propose_translate(state, rng); break;
    case Move::kContrast: p = propose_b(state, rng, target.prior()); break;
    case Move::kAlpha: p = propose_alpha(state, rng, config.mode); break;
  }
  if (config.mode == AcceptanceMode::kPaperLiteral) p.log_hastings = 0.0;
  if (p.log_hastings == -std::numeric_limits<double>::infinity()) return result;

  ChainState candidate;
  try {
    candidate = result.move == Move::kContrast ? target.with_contrast(state, p.candidate.b)
                                               : target.evaluate(p.candidate);
  } catch (const forward::SolverError&) {
    result.solver_failure = true;
    return result;
  }
  if (!candidate.valid()) return result;

  const double log_ratio = state.energy - candidate.energy + p.log_hastings;
  if (log_ratio >= 0.0 || rng.uniform01() < std::exp(log_ratio)) {
    state = std::move(candidate);
    result.accepted = true;
  }
  return result;
}

ChainState initialize(const Target& target, const KernelConfig& config, Rng& rng) {
  const Box& g = target.prior().domain;
  for (int attempt = 0; attempt < config.init_attempts; ++attempt) {
    bayes::Theta theta;
    for (int i = 0; i < config.cloud_size; ++i) {
      const double x = rng.uniform(g.lo.x, g.hi.x);
      const double y = rng.uniform(g.lo.y, g.hi.y);
      theta.cloud.points.push_back({x, y});
    }
    theta.b = rng.gamma(target.prior().shape, target.prior().rate);
    try {
      const auto tri = geometry::delaunay(theta.cloud.points);
      // Just above the largest circumradius every interior edge is covered,
      // leaving the convex hull.
      theta.cloud.alpha = geometry::circumradius_range(tri).r_max * (1.0 + 1e-9);
    } catch (const geometry::DegenerateGeometry&) {
      continue;
    }
    try {
      ChainState s = target.evaluate(theta);
      if (s.valid()) return s;
    } catch (const forward::SolverError&) {
    }
  }
  throw std::runtime_error("initialize: no valid initial cloud in " + std::to_string(config.init_attempts) +
                           " attempts");
}

double ChainRecord::acceptance_rate(Move move) const {
  const auto i = static_cast<std::size_t>(move);
  return proposed[i] == 0 ? 0.0 : static_cast<double>(accepted[i]) / static_cast<double>(proposed[i]);
}

ChainRecord run_chain(const Target& target, const KernelConfig& config, std::optional<bayes::Theta> init,
                      const Progress& progress) {
  config.validate();
  Rng rng(config.seed);
  ChainRecord record;
  ChainState state;
  if (init) {
    state = target.evaluate(*init);
    if (!state.valid()) throw std::invalid_argument("run_chain: initial state is not valid");
  } else {
    state = initialize(target, config, rng);
  }
  const auto snapshot = [&](long iter) {
    record.snapshots.push_back({iter, state.theta.cloud.alpha, state.theta.b, state.theta.cloud.points});
  };
  snapshot(0);
  record.rows.reserve(static_cast<std::size_t>(config.t_max));
  for (long t = 1; t <= config.t_max; ++t) {
    const StepResult step = mh_step(state, target, config, rng);
    const auto i = static_cast<std::size_t>(step.move);
    ++record.proposed[i];
    if (step.accepted) ++record.accepted[i];
    if (step.solver_failure) ++record.solver_failures;
    record.rows.push_back({t, step.move, step.accepted, state.energy, state.theta.b, state.theta.cloud.alpha,
                           state.area});
    if (t % config.snapshot_period == 0) snapshot(t);
    if (progress.period > 0 && progress.callback && t % progress.period == 0) progress.callback(t, state);
  }
  return record;
}

}  // namespace cloudscat::mcmc
