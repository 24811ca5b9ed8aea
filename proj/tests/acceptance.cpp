// Acceptance checks, one PASS/FAIL line per criterion.
//
//   acceptance [--work DIR] [N ...]
//
// With no numbers every criterion runs. 9 and 10 run two desk-scale chains
// (each 2e5 iterations) and take hours; ctest registers them separately.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cloudscat/bayes.hpp"
#include "cloudscat/commands.hpp"
#include "cloudscat/config.hpp"
#include "cloudscat/forward.hpp"
#include "cloudscat/geometry.hpp"
#include "cloudscat/mcmc.hpp"
#include "cloudscat/specfun.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace cloudscat;
using cplx = std::complex<double>;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path g_work = fs::current_path() / "acceptance_work";

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

// 1 --------------------------------------------------------------------------
Outcome special_functions() {
  double worst_j = 0.0, worst_y = 0.0;
  const auto rows = oracle::bessel_fixture();
  for (const auto& r : rows) {
    worst_j = std::max(worst_j, std::abs(specfun::bessel_j0(r.x) - r.j0) / std::abs(r.j0));
    worst_y = std::max(worst_y, std::abs(specfun::bessel_y0(r.x) - r.y0) / std::abs(r.y0));
  }
  const bool ok = rows.size() == 200 && worst_j <= 1e-12 && worst_y <= 1e-12;
  return {ok, std::to_string(rows.size()) + " points, max rel err J0 " + fmt(worst_j) + ", Y0 " + fmt(worst_y) +
                  " (limit 1e-12)"};
}

// Max-abs difference between two fields over the nodes of `coarse`.
double coarse_gap(const ComplexField& a, const ComplexField& b, const Grid2D& coarse,
                  const std::function<bool(Point2)>& keep = nullptr) {
  double worst = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const Point2 p = coarse.node(i);
    if (keep && !keep(p)) continue;
    const long ia = a.grid.find_node(p), ib = b.grid.find_node(p);
    worst = std::max(worst, std::abs(a[static_cast<std::size_t>(ia)] - b[static_cast<std::size_t>(ib)]));
  }
  return worst;
}

const double kSpacings[] = {0.04, 0.02, 0.01};

// 2 --------------------------------------------------------------------------
Outcome quadrature_order() {
  // b(x) = b0 exp(-|x|^2 / (2 s^2)), set to zero below 1e-14 of its peak.
  const double b0 = 4.0, s = 0.04, k = bayes::kHighWavenumber;
  const Point2 dir{1.0, 0.0};
  std::vector<ComplexField> fields;
  for (double h : kSpacings) {
    const Grid2D grid = Grid2D::centered(0.4, h);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double g = std::exp(-dot(grid.node(i), grid.node(i)) / (2 * s * s));
      values[i] = g < 1e-14 ? 0.0 : b0 * g;
    }
    const auto field = ScattererField::from_values(grid, values);
    fields.push_back(forward::solve_direct(field, k, forward::incident_plane_wave(dir, k, grid), grid));
  }
  const Grid2D coarse = Grid2D::centered(0.4, kSpacings[0]);
  const double e1 = coarse_gap(fields[0], fields[1], coarse);
  const double e2 = coarse_gap(fields[1], fields[2], coarse);
  const double order = std::log2(e1 / e2);
  return {order >= 3.5 && order <= 4.5, "self-convergence gaps " + fmt(e1) + ", " + fmt(e2) + " -> order " +
                                             fmt(order) + " (band [3.5, 4.5])"};
}

// 3 --------------------------------------------------------------------------
Outcome disc_oracle() {
  const double radius = 0.2, b = 25.0;
  const Point2 dir{1.0, 0.0}, centre{0.0, 0.0};
  const Grid2D coarse = Grid2D::centered(0.4, kSpacings[0]);
  const auto exterior = [&](Point2 p) { return norm(p) > radius + kSpacings[0]; };
  bool ok = true;
  std::string detail;
  for (double k : {bayes::kLowWavenumber, bayes::kHighWavenumber}) {
    std::vector<double> errors, equal_area;
    for (double h : kSpacings) {
      const Grid2D grid = Grid2D::centered(0.4, h);
      std::vector<bool> mask(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) mask[i] = distance(grid.node(i), centre) <= radius;
      const auto field = ScattererField::piecewise_constant(grid, mask, b);
      const auto u = forward::solve_direct(field, k, forward::incident_plane_wave(dir, k, grid), grid);
      // Diagnostic only: the series for the disc with the rasterized area.
      const double r_eq = std::sqrt(static_cast<double>(field.support().size()) * h * h / std::numbers::pi);
      double worst = 0.0, worst_eq = 0.0;
      for (std::size_t i = 0; i < coarse.size(); ++i) {
        const Point2 p = coarse.node(i);
        if (!exterior(p)) continue;
        const cplx v = u[static_cast<std::size_t>(grid.find_node(p))];
        worst = std::max(worst, std::abs(v - oracle::disc_total_field(k, b, radius, centre, dir, p)));
        worst_eq = std::max(worst_eq, std::abs(v - oracle::disc_total_field(k, b, r_eq, centre, dir, p)));
      }
      errors.push_back(worst);
      equal_area.push_back(worst_eq);
    }
    const bool decreasing = errors[0] > errors[1] && errors[1] > errors[2];
    ok = ok && decreasing;
    detail += "k=" + fmt(k) + " max exterior err " + fmt(errors[0]) + ", " + fmt(errors[1]) + ", " +
              fmt(errors[2]) + (decreasing ? " (decreasing)" : " (NOT decreasing)") + ", vs equal-area disc " +
              fmt(equal_area[0]) + ", " + fmt(equal_area[1]) + ", " + fmt(equal_area[2]) + "; ";
  }
  return {ok, detail + "absolute level recorded only"};
}

// 4 --------------------------------------------------------------------------
Outcome cross_solver() {
  const Grid2D grid = Grid2D::centered(0.4, 0.02);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Point2 centre{0.2 * u(rng) - 0.1, 0.2 * u(rng) - 0.1};
    const double r0 = 0.08 + 0.1 * u(rng);
    std::vector<double> amp, phase;
    for (int j = 1; j <= 3; ++j) {
      amp.push_back(0.3 / j * u(rng));
      phase.push_back(2 * std::numbers::pi * u(rng));
    }
    const double b = 5.0 + 20.0 * u(rng);
    const double k = trial % 2 == 0 ? bayes::kHighWavenumber : bayes::kLowWavenumber;
    const double angle = 2 * std::numbers::pi * u(rng);
    const auto field = ScattererField::piecewise_constant(grid, oracle::star_mask(grid, centre, r0, amp, phase), b);
    const auto inc = forward::incident_plane_wave({std::cos(angle), std::sin(angle)}, k, grid);
    const auto direct = forward::solve_direct(field, k, inc, grid);
    const auto reference = forward::solve_reference(field, k, inc, grid);
    worst = std::max(worst, forward::relative_l2(direct, reference));
  }
  return {worst <= 1e-6, "10 star-shaped scatterers, max relative L2 gap " + fmt(worst) + " (limit 1e-6)"};
}

// 5 --------------------------------------------------------------------------
Outcome benchmark_ordering() {
  std::ostringstream log;
  const auto rows = cli::cmd_benchmark(config::preset("desk"), log);
  bool ok = true;
  int checked = 0;
  std::string detail;
  for (const auto& r : rows) {
    if (r.support_fraction > 0.1) continue;
    if (r.support_fraction == 0.0) {
      // No scatterer: both paths return the incident field; not compared.
      detail += "empty: " + fmt(1e3 * r.t_direct) + " vs " + fmt(1e3 * r.t_reference) + " ms (not compared); ";
      continue;
    }
    ++checked;
    ok = ok && r.t_direct < r.t_reference;
    detail += fmt(100 * r.support_fraction) + "%: " + fmt(1e3 * r.t_direct) + " vs " + fmt(1e3 * r.t_reference) +
              " ms; ";
  }
  return {ok && checked > 0, detail + "direct vs reference, N = 40"};
}

// 6 --------------------------------------------------------------------------
Outcome alpha_shape_oracle() {
  std::mt19937_64 rng(6);
  int mismatches = 0, cases = 0;
  for (int c = 0; c < 100; ++c) {
    const int m = 10 + static_cast<int>(rng() % 6);
    const auto pts = oracle::random_cloud(rng, m, -0.4, 0.4);
    const auto tri = geometry::delaunay(pts);
    const auto range = geometry::circumradius_range(tri);
    for (int j = 0; j < 5; ++j) {
      // Log-spaced from r_min to r_max, nudged off the exact circumradii.
      const double t = j / 4.0;
      double alpha = range.r_min * std::pow(range.r_max / range.r_min, t);
      alpha *= j == 0 ? 1.0 + 1e-9 : (j == 4 ? 1.0 - 1e-9 : 1.0);
      const auto shape = geometry::alpha_shape(tri, alpha);
      const std::set<geometry::Edge> got(shape.edges.begin(), shape.edges.end());
      ++cases;
      if (got != oracle::brute_alpha_edges(pts, alpha)) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(cases) + " (cloud, alpha) cases, " + std::to_string(mismatches) +
                               " edge-set mismatches against the brute-force disc oracle"};
}

// 7 --------------------------------------------------------------------------
Outcome kite_area() {
  const auto samples = bayes::sample_curve(bayes::kite_curve(0.1), 10000);
  const double area = geometry::polygon_area(samples);
  const double exact = 3 * std::numbers::pi / 200;
  const double rel = std::abs(area - exact) / exact;
  const double vs_table = std::abs(area - 4.68e-2) / 4.68e-2;
  return {rel <= 1e-4 && vs_table <= 0.01, "area " + fmt(area) + ", rel err vs 3pi/200 " + fmt(rel) +
                                               ", vs 4.68e-2 " + fmt(vs_table)};
}

// 8 --------------------------------------------------------------------------
Outcome prior_recovery() {
  const bayes::ConstantLikelihood flat;
  const bayes::PriorSpec prior;
  const mcmc::Target target(flat, prior);
  mcmc::KernelConfig kc;
  kc.weights = {0.05, 0.05, 0.85, 0.05};
  kc.seed = 8;
  kc.burn_in = 5000;
  kc.t_max = kc.burn_in + 50000;
  kc.mode = mcmc::AcceptanceMode::kExactMH;
  const auto record = mcmc::run_chain(target, kc);
  const auto s = mcmc::summarize(record.rows, kc.burn_in);
  const double mean = prior.shape / prior.rate;
  const double var = prior.shape / (prior.rate * prior.rate);
  const double em = std::abs(s.cm_b - mean) / mean, ev = std::abs(s.var_b - var) / var;
  return {s.samples == 50000 && em <= 0.03 && ev <= 0.03,
          std::to_string(s.samples) + " samples: mean " + fmt(s.cm_b) + " (" + fmt(100 * em) + "%), variance " +
              fmt(s.var_b) + " (" + fmt(100 * ev) + "%) vs Gamma mean 40, variance 800"};
}

// 11 -------------------------------------------------------------------------
Outcome equivariance() {
  const double s = 3.7;
  std::mt19937_64 gen(11);
  double worst = 0.0;
  int states = 0;
  for (int trial = 0; trial < 200 && states < 50; ++trial) {
    const auto pts = oracle::random_cloud(gen, 12, -0.3, 0.3);
    mcmc::ChainState base;
    base.theta.cloud.points = pts;
    base.theta.cloud.alpha = geometry::circumradius_range(geometry::delaunay(pts)).r_max * (1 + 1e-9);
    base.theta.b = 20.0;
    base.shape = geometry::build_shape(base.theta.cloud);
    if (!base.shape.valid()) continue;
    ++states;
    mcmc::ChainState scaled = base;
    for (auto& p : scaled.theta.cloud.points) p = s * p;
    scaled.theta.cloud.alpha *= s;
    scaled.shape = geometry::build_shape(scaled.theta.cloud);

    const auto compare = [&](const mcmc::Proposal& a, const mcmc::Proposal& b) {
      for (std::size_t i = 0; i < a.candidate.cloud.points.size(); ++i) {
        const Point2 want = s * a.candidate.cloud.points[i];
        worst = std::max(worst, distance(want, b.candidate.cloud.points[i]) / norm(want));
      }
      const double want = s * a.candidate.cloud.alpha;
      worst = std::max(worst, std::abs(want - b.candidate.cloud.alpha) / want);
    };
    const std::uint64_t seed = gen();
    {
      mcmc::Rng r1(seed), r2(seed);
      compare(mcmc::propose_point_move(base, r1), mcmc::propose_point_move(scaled, r2));
    }
    {
      mcmc::Rng r1(seed), r2(seed);
      compare(mcmc::propose_translate(base, r1), mcmc::propose_translate(scaled, r2));
    }
    for (auto mode : {mcmc::AcceptanceMode::kExactMH, mcmc::AcceptanceMode::kPaperLiteral}) {
      mcmc::Rng r1(seed), r2(seed);
      compare(mcmc::propose_alpha(base, r1, mode), mcmc::propose_alpha(scaled, r2, mode));
    }
  }
  return {states == 50 && worst <= 1e-12, std::to_string(states) + " states, s = 3.7, max relative deviation " +
                                              fmt(worst) + " (limit 1e-12)"};
}

// 12 -------------------------------------------------------------------------
config::ExperimentConfig determinism_config(const fs::path& out) {
  auto c = config::preset("desk");
  c.name = "determinism";
  c.grid = {20, 0.04, {-0.4, -0.4}};
  c.synth_grid = {40, 0.02, {-0.4, -0.4}};
  c.design.observation_stride = 2;
  c.kernel.t_max = 1000;
  c.kernel.burn_in = 100;
  c.kernel.seed = 12;
  c.output = out.string();
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome seed_determinism() {
  std::vector<std::string> chains, snapshots, data;
  for (const char* run : {"a", "b"}) {
    const auto dir = g_work / "determinism" / run;
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto c = determinism_config(dir);
    std::ostringstream log;
    const auto obs = cli::cmd_synthesize(c, log);
    const auto files = cli::cmd_run(c, obs.csv, {}, log);
    data.push_back(slurp(obs.csv));
    chains.push_back(slurp(files.front().chain));
    snapshots.push_back(slurp(files.front().snapshots));
  }
  const bool ok = !chains[0].empty() && chains[0] == chains[1] && snapshots[0] == snapshots[1] && data[0] == data[1];
  return {ok, "t_max = 1000, two runs: chain CSV " + std::to_string(chains[0].size()) + " bytes, " +
                  (chains[0] == chains[1] ? "identical" : "DIFFERENT") + "; snapshots " +
                  (snapshots[0] == snapshots[1] ? "identical" : "DIFFERENT") + "; observations " +
                  (data[0] == data[1] ? "identical" : "DIFFERENT")};
}

// 9, 10 ----------------------------------------------------------------------
struct DeskRun {
  mcmc::Summary summary;
  double true_area = 0.0;
  double true_b = 0.0;
  double seconds = 0.0;
};

std::map<std::string, DeskRun> g_desk;

const DeskRun& desk_run(const std::string& preset) {
  if (auto it = g_desk.find(preset); it != g_desk.end()) return it->second;
  auto c = config::preset(preset);
  c.output = (g_work / preset).string();
  fs::create_directories(c.output);
  const auto t0 = std::chrono::steady_clock::now();
  std::ostream& log = std::cerr;
  const auto obs = cli::cmd_synthesize(c, log);
  const auto files = cli::cmd_run(c, obs.csv, {}, log);
  std::ifstream in(files.front().chain);
  const auto rows = mcmc::read_chain_csv(in);
  DeskRun r;
  r.summary = mcmc::summarize(rows, c.kernel.burn_in);
  r.true_area = bayes::kite_area(c.scatterer.scatterer_scale);
  r.true_b = c.scatterer.b;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return g_desk.emplace(preset, r).first->second;
}

Outcome desk_recovery() {
  const auto& r = desk_run("desk");
  const double ea = std::abs(r.summary.cm_area - r.true_area) / r.true_area;
  const double eb = std::abs(r.summary.cm_b - r.true_b) / r.true_b;
  return {ea <= 0.05 && eb <= 0.15,
          "CM area " + fmt(r.summary.cm_area) + " vs " + fmt(r.true_area) + " (" + fmt(100 * ea) +
              "%, limit 5%), CM b " + fmt(r.summary.cm_b) + " (" + fmt(100 * eb) + "%, limit 15%), MAP area " +
              fmt(r.summary.map_area) + ", MAP b " + fmt(r.summary.map_b) + ", " + fmt(r.seconds) + " s"};
}

Outcome rotation() {
  const auto& base = desk_run("desk");
  const auto& rot = desk_run("desk-rotated");
  const double gap = std::abs(rot.summary.cm_area - base.summary.cm_area) / base.summary.cm_area;
  return {gap <= 0.03, "CM area zeta=pi/6 " + fmt(rot.summary.cm_area) + " vs zeta=0 " + fmt(base.summary.cm_area) +
                           " (" + fmt(100 * gap) + "%, limit 3%), CM b " + fmt(rot.summary.cm_b) + ", " +
                           fmt(rot.seconds) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, Outcome (*)()>> criteria{
      {1, {"special functions vs 30-digit fixture", special_functions}},
      {2, {"quadrature self-convergence order", quadrature_order}},
      {3, {"disc series oracle convergence", disc_oracle}},
      {4, {"direct vs reference solver", cross_solver}},
      {5, {"benchmark ordering", benchmark_ordering}},
      {6, {"alpha-shape vs disc oracle", alpha_shape_oracle}},
      {7, {"kite area", kite_area}},
      {8, {"prior recovery", prior_recovery}},
      {9, {"desk-scale recovery", desk_recovery}},
      {10, {"rotation insensitivity", rotation}},
      {11, {"kernel scale equivariance", equivariance}},
      {12, {"seed determinism", seed_determinism}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--work" && i + 1 < argc) {
      g_work = argv[++i];
    } else {
      selected.push_back(std::stoi(arg));
    }
  }
  if (selected.empty()) {
    for (const auto& [n, _] : criteria) selected.push_back(n);
  }
  fs::create_directories(g_work);
  int failures = 0;
  for (int n : selected) {
    const auto it = criteria.find(n);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << n << "\n";
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << " (" << it->second.first << "): " << o.detail
              << " [" << fmt(secs) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
