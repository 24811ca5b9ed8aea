#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cloudscat/bayes.hpp"
#include "cloudscat/geometry.hpp"

// Point-cloud Metropolis-Hastings sampler over theta = (Q, alpha, b).

namespace cloudscat::mcmc {

enum class Move : int { kPoint = 0, kTranslate = 1, kContrast = 2, kAlpha = 3 };
inline constexpr int kMoveCount = 4;
const char* to_string(Move move);

enum class AcceptanceMode { kExactMH, kPaperLiteral };
const char* to_string(AcceptanceMode mode);
/// "exact-mh" or "paper-literal"; throws std::invalid_argument otherwise.
AcceptanceMode parse_mode(const std::string& text);

struct KernelConfig {
  std::array<double, kMoveCount> weights{0.4, 0.2, 0.2, 0.2};  // point, translate, b, alpha
  std::uint64_t seed = 1;
  long t_max = 1000;
  long burn_in = 100;
  AcceptanceMode mode = AcceptanceMode::kExactMH;
  long snapshot_period = 100;
  int cloud_size = 12;             // m
  int samples_per_vertex = 0;      // spline samples, <= 0 selects the geometry default
  int init_attempts = 10000;

  /// Throws std::invalid_argument when the fields are inconsistent.
  void validate() const;
};

/// 64-bit Mersenne twister with an explicit, platform-independent mapping
/// to [0, 1); gamma draws use the standard library distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform01() * static_cast<double>(n)); }
  double gamma(double shape, double rate) {
    return std::gamma_distribution<double>(shape, 1.0 / rate)(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Current point of the chain with everything derived from theta.
struct ChainState {
  bayes::Theta theta;
  geometry::ShapeSummary shape;
  double energy = bayes::kInfiniteEnergy;
  double area = 0.0;

  bool valid() const { return shape.valid() && energy < bayes::kInfiniteEnergy; }
};

struct Proposal {
  bayes::Theta candidate;
  double log_hastings = 0.0;
};

/// Mean distance over all pairs not involving `exclude` (-1 for all pairs).
double mean_pairwise_distance(const std::vector<Point2>& points, int exclude = -1);

/// Move 1: one uniformly chosen point shifted by a per-coordinate uniform
/// increment on (-d, d), d the mean pairwise distance of the other points.
Proposal propose_point_move(const ChainState& state, Rng& rng);
/// Move 2: every point shifted by one shared per-coordinate uniform increment
/// on (-d, d), d the mean over all pairs.
Proposal propose_translate(const ChainState& state, Rng& rng);
/// Move 3: independence draw b' ~ Gamma(shape, rate).
Proposal propose_b(const ChainState& state, Rng& rng, const bayes::PriorSpec& prior);
/// Move 4: alpha' = alpha / 2 + U(r_min, r_max) / 2 with the current circumradius range.
Proposal propose_alpha(const ChainState& state, Rng& rng, AcceptanceMode mode);

/// Energy function of the chain: a likelihood plus the prior.
class Target {
 public:
  Target(const bayes::Likelihood& likelihood, bayes::PriorSpec prior, int samples_per_vertex = 0)
      : likelihood_(likelihood), prior_(prior), samples_per_vertex_(samples_per_vertex) {}

  const bayes::PriorSpec& prior() const { return prior_; }

  /// Builds the shape and energy; an invalid state carries infinite energy.
  /// Forward-solver failures propagate as forward::SolverError.
  ChainState evaluate(const bayes::Theta& theta) const;
  /// Same shape as `current` with a new b; skips the geometry rebuild.
  ChainState with_contrast(const ChainState& current, double b) const;

 private:
  const bayes::Likelihood& likelihood_;
  bayes::PriorSpec prior_;
  int samples_per_vertex_;
};

struct StepResult {
  Move move = Move::kPoint;
  bool accepted = false;
  bool solver_failure = false;
};

/// One Metropolis-Hastings transition. Candidates with invalid hulls or
/// impossible priors are rejected before any likelihood evaluation; on
/// rejection `state` is left untouched.
StepResult mh_step(ChainState& state, const Target& target, const KernelConfig& config, Rng& rng);

/// Q uniform on the prior domain, alpha = r_max of its triangulation (the
/// convex hull), b from the prior; redrawn until the state is valid.
/// Throws std::runtime_error after config.init_attempts failures.
ChainState initialize(const Target& target, const KernelConfig& config, Rng& rng);

struct IterationRecord {
  long iter = 0;
  Move move = Move::kPoint;
  bool accepted = false;
  double energy = 0.0;
  double b = 0.0;
  double alpha = 0.0;
  double area = 0.0;
};

struct Snapshot {
  long iter = 0;
  double alpha = 0.0;
  double b = 0.0;
  std::vector<Point2> points;
};

struct ChainRecord {
  std::vector<IterationRecord> rows;
  std::vector<Snapshot> snapshots;  // iteration 0 is the initial state
  std::array<long, kMoveCount> proposed{};
  std::array<long, kMoveCount> accepted{};
  long solver_failures = 0;

  double acceptance_rate(Move move) const;
};

/// Called after every `period` transitions with the iteration and current state.
struct Progress {
  long period = 0;
  std::function<void(long, const ChainState&)> callback;
};

/// Runs config.t_max transitions from `init` (or from initialize()).
ChainRecord run_chain(const Target& target, const KernelConfig& config,
                      std::optional<bayes::Theta> init = std::nullopt, const Progress& progress = {});

/// CSV `iter,move,accepted,energy,b,alpha,area`, one row per iteration.
void write_chain_csv(std::ostream& out, const ChainRecord& record);
std::vector<IterationRecord> read_chain_csv(std::istream& in);
/// CSV `iter,alpha,b,x,y`, one row per point of every snapshot.
void write_snapshots_csv(std::ostream& out, const std::vector<Snapshot>& snapshots);
std::vector<Snapshot> read_snapshots_csv(std::istream& in);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<long> counts;

  double edge(std::size_t i) const { return lo + (hi - lo) * static_cast<double>(i) / counts.size(); }
};

/// `bins` equal-width bins over [lo, hi]; the right edge is closed.
Histogram histogram(const std::vector<double>& values, double lo, double hi, int bins);

struct Summary {
  long samples = 0;
  double cm_area = 0.0;
  double cm_b = 0.0;
  double map_area = 0.0;
  double map_b = 0.0;
  double map_energy = 0.0;
  long map_iter = 0;
  double var_b = 0.0;  // unbiased sample variance
  Histogram area_hist;
  Histogram b_hist;
  std::vector<std::pair<long, double>> trace;  // (iter, -energy)
};

/// Post-burn-in estimators. Histogram ranges default to the sample range
/// when lo >= hi. Throws std::invalid_argument if burn_in >= rows.size().
Summary summarize(const std::vector<IterationRecord>& rows, long burn_in, int bins = 50,
                  std::pair<double, double> area_range = {0.0, 0.0},
                  std::pair<double, double> b_range = {0.0, 0.0});

}  // namespace cloudscat::mcmc
