#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "cloudscat/commands.hpp"
#include "cloudscat/forward.hpp"

namespace cloudscat::cli {
namespace {

using Clock = std::chrono::steady_clock;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw CommandError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CommandError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandError("cannot read " + path.string());
  return in;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// chain_seed7.csv -> "seed7"
std::string chain_tag(const fs::path& chain) {
  std::string stem = chain.stem().string();
  const std::string prefix = "chain_";
  return stem.rfind(prefix, 0) == 0 ? stem.substr(prefix.size()) : stem;
}

double true_area(const config::ExperimentConfig& c) {
  return geometry::polygon_area(bayes::sample_curve(c.true_curve(), c.scatterer.samples));
}

}  // namespace

ObservationFiles observation_paths(const fs::path& out_dir) {
  return {out_dir / "observations.csv", out_dir / "observations.meta.json"};
}

ObservationFiles cmd_synthesize(const config::ExperimentConfig& c, std::ostream& log) {
  c.validate();
  const Grid2D grid = c.grid.build();
  const Grid2D fine = c.synth_grid.build();
  const auto design = c.design_for(grid);
  bayes::SynthesisOptions opts;
  opts.b_value = c.scatterer.b;
  opts.seed = c.synthesis.seed;
  opts.noise_free = c.synthesis.noise_free;
  opts.curve_samples = c.scatterer.samples;
  const auto t0 = Clock::now();
  const auto obs = bayes::synthesize(c.true_curve(), design, fine, opts);
  double signal = 0.0;
  for (const auto& v : obs.data) signal += std::norm(v);
  const double rms = std::sqrt(signal / static_cast<double>(obs.data.size()));

  const auto paths = observation_paths(c.output);
  {
    auto out = open_out(paths.csv);
    bayes::write_observations_csv(out, obs, design);
  }
  {
    auto out = open_out(paths.meta);
    bayes::write_meta(out, obs.meta);
  }
  log << "synthesize: " << design.direction_count() << " directions x " << design.point_count()
      << " points on N = " << fine.n() << ", h = " << fine.h() << " (" << seconds_since(t0) << " s)\n"
      << "synthesize: rms |u_s| = " << rms << ", sigma_low = " << design.sigma_low
      << ", rms/sigma = " << rms / design.sigma_low << "\n"
      << "synthesize: wrote " << paths.csv.string() << "\n";
  return paths;
}

std::vector<RunFiles> cmd_run(const config::ExperimentConfig& c, const fs::path& observations,
                              const std::vector<std::uint64_t>& seeds_in, std::ostream& log) {
  c.validate();
  const Grid2D grid = c.grid.build();
  const auto design = c.design_for(grid);
  bayes::Observations obs;
  try {
    auto in = open_in(observations);
    obs = bayes::read_observations_csv(in, design);
  } catch (const bayes::ContractError& e) {
    throw CommandError(std::string("observations do not match the configured design: ") + e.what());
  }
  fs::path meta_path = observations;
  meta_path.replace_extension(".meta.json");
  if (fs::exists(meta_path)) {
    auto in = open_in(meta_path);
    obs.meta = bayes::read_meta(in);
    if (obs.meta.sigma_low != design.sigma_low || obs.meta.sigma_high != design.sigma_high ||
        obs.meta.zeta != design.zeta) {
      throw CommandError("observations metadata (sigma, zeta) do not match the configured design");
    }
  }
  const auto model = std::make_shared<const bayes::ForwardModel>(grid, design);
  const bayes::GaussianLikelihood likelihood(model, obs);
  const mcmc::Target target(likelihood, c.prior_spec(), c.kernel.samples_per_vertex);

  const std::vector<std::uint64_t> seeds = seeds_in.empty() ? std::vector{c.kernel.seed} : seeds_in;
  std::vector<RunFiles> files;
  for (auto s : seeds) {
    const fs::path dir = c.output;
    const std::string tag = "seed" + std::to_string(s);
    files.push_back({s, dir / ("chain_" + tag + ".csv"), dir / ("snapshots_" + tag + ".csv"),
                     dir / ("run_" + tag + ".log")});
  }
  std::mutex log_mutex;
  std::vector<std::exception_ptr> errors(seeds.size());
  const auto run_one = [&](std::size_t i) {
    try {
      auto kc = c.kernel_config();
      kc.seed = seeds[i];
      const auto t0 = Clock::now();
      const mcmc::Progress progress{std::max<long>(1, kc.t_max / 20), [&](long t, const mcmc::ChainState& st) {
                                      std::lock_guard lock(log_mutex);
                                      log << "run[" << seeds[i] << "]: " << t << "/" << kc.t_max
                                          << " energy = " << st.energy << " area = " << st.area
                                          << " b = " << st.theta.b << "\n"
                                          << std::flush;
                                    }};
      const auto record = mcmc::run_chain(target, kc, std::nullopt, progress);
      const double wall = seconds_since(t0);
      {
        auto out = open_out(files[i].chain);
        mcmc::write_chain_csv(out, record);
      }
      {
        auto out = open_out(files[i].snapshots);
        mcmc::write_snapshots_csv(out, record.snapshots);
      }
      auto out = open_out(files[i].log);
      out << "seed " << seeds[i] << "\nmode " << mcmc::to_string(kc.mode) << "\nt_max " << kc.t_max << "\nwall_clock_s " << wall
          << "\nsolver_failures " << record.solver_failures << "\n";
      for (int m = 0; m < mcmc::kMoveCount; ++m) {
        const auto mv = static_cast<mcmc::Move>(m);
        out << "acceptance_" << mcmc::to_string(mv) << ' ' << record.acceptance_rate(mv) << " ("
            << record.accepted[static_cast<std::size_t>(m)] << '/' << record.proposed[static_cast<std::size_t>(m)]
            << ")\n";
      }
      std::lock_guard lock(log_mutex);
      log << "run[" << seeds[i] << "]: done in " << wall << " s, wrote " << files[i].chain.string() << "\n";
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (seeds.size() == 1) {
    run_one(0);
  } else {
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < seeds.size(); ++i) workers.emplace_back(run_one, i);
    for (auto& w : workers) w.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return files;
}

std::vector<SummaryFiles> cmd_summarize(const config::ExperimentConfig& c, const std::vector<fs::path>& chains,
                                        long burn_in, std::ostream& log) {
  if (chains.empty()) throw CommandError("summarize: no chain files given");
  const double area_true = true_area(c);
  std::vector<SummaryFiles> out_files;
  for (const auto& chain : chains) {
    auto in = open_in(chain);
    const auto rows = mcmc::read_chain_csv(in);
    if (burn_in < 0 || static_cast<std::size_t>(burn_in) >= rows.size()) {
      throw CommandError("summarize: burn-in " + std::to_string(burn_in) + " is not below the chain length " +
                         std::to_string(rows.size()));
    }
    // Fixed ranges around the truth keep the bin edges a function of the config.
    const auto s = mcmc::summarize(rows, burn_in, c.histogram_bins, {0.0, 2.0 * area_true}, {0.0, 2.0 * c.scatterer.b});
    const fs::path dir = chain.parent_path();
    const std::string tag = chain_tag(chain);
    SummaryFiles f{dir / ("summary_" + tag + ".csv"), dir / ("hist_area_" + tag + ".csv"),
                   dir / ("hist_b_" + tag + ".csv"), dir / ("trace_" + tag + ".csv"), {}};
    {
      auto out = open_out(f.table);
      out << "quantity,true_value,conditional_mean,maximum_a_posteriori\n" << std::setprecision(17);
      out << "area," << area_true << ',' << s.cm_area << ',' << s.map_area << '\n';
      out << "b," << c.scatterer.b << ',' << s.cm_b << ',' << s.map_b << '\n';
    }
    const auto write_hist = [&](const fs::path& path, const mcmc::Histogram& h) {
      auto out = open_out(path);
      out << "bin_lo,bin_hi,count\n" << std::setprecision(17);
      for (std::size_t i = 0; i < h.counts.size(); ++i) out << h.edge(i) << ',' << h.edge(i + 1) << ',' << h.counts[i] << '\n';
    };
    write_hist(f.area_histogram, s.area_hist);
    write_hist(f.b_histogram, s.b_hist);
    {
      auto out = open_out(f.trace);
      out << "iter,neg_energy\n" << std::setprecision(17);
      for (const auto& [iter, v] : s.trace) out << iter << ',' << v << '\n';
    }
    const fs::path snaps = dir / ("snapshots_" + tag + ".csv");
    if (fs::exists(snaps)) {
      auto sin = open_in(snaps);
      const auto snapshots = mcmc::read_snapshots_csv(sin);
      if (!snapshots.empty()) {
        const auto nearest = std::min_element(snapshots.begin(), snapshots.end(), [&](const auto& a, const auto& b) {
          return std::labs(a.iter - s.map_iter) < std::labs(b.iter - s.map_iter);
        });
        f.map_cloud = dir / ("map_cloud_" + tag + ".csv");
        auto out = open_out(f.map_cloud);
        mcmc::write_snapshots_csv(out, {*nearest});
      }
    }
    log << "summarize[" << tag << "]: " << s.samples << " samples, area CM = " << s.cm_area << " MAP = " << s.map_area
        << " (true " << area_true << "), b CM = " << s.cm_b << " MAP = " << s.map_b << "\n";
    out_files.push_back(f);
  }
  return out_files;
}

std::vector<BenchmarkRow> cmd_benchmark(const config::ExperimentConfig& c, std::ostream& log,
                                        const std::vector<double>& radii_in) {
  c.validate();
  const Grid2D grid = c.grid.build();
  const std::vector<double> radii =
      radii_in.empty() ? std::vector<double>{0.0, 0.03, 0.05, 0.07, 0.09, 0.11, 0.14, 0.17, 0.2} : radii_in;
  const double k = c.design.k_high;
  const auto incident = forward::incident_plane_wave(bayes::incident_directions(c.design.zeta).front(), k, grid);
  const Point2 centre = 0.5 * (grid.bounds().lo + grid.bounds().hi);
  std::vector<BenchmarkRow> rows;
  for (double r : radii) {
    ScattererField field = ScattererField::zero(grid);
    if (r > 0.0) {
      std::vector<bool> mask(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) mask[i] = distance(grid.node(i), centre) <= r;
      field = ScattererField::piecewise_constant(grid, mask, c.scatterer.b);
    }
    const auto direct = forward::solve_direct(field, k, incident, grid);
    const auto reference = forward::solve_reference(field, k, incident, grid);
    const double gap = forward::relative_l2(direct, reference);
    if (!(gap <= 1e-6)) {
      std::ostringstream msg;
      msg << "benchmark: solvers disagree at radius " << r << " (relative L2 " << gap << "); no timings published";
      throw CommandError(msg.str());
    }
    const auto time_best = [&](auto&& solve) {
      double best = 1e300;
      for (int rep = 0; rep < 3; ++rep) {
        const auto t0 = Clock::now();
        solve();
        best = std::min(best, seconds_since(t0));
      }
      return best;
    };
    BenchmarkRow row;
    row.support_fraction = field.support_fraction();
    row.t_direct = time_best([&] { return forward::solve_direct(field, k, incident, grid); });
    row.t_reference = time_best([&] { return forward::solve_reference(field, k, incident, grid); });
    log << "benchmark: support " << row.support_fraction << " direct " << row.t_direct << " s reference "
        << row.t_reference << " s (agreement " << gap << ")\n";
    rows.push_back(row);
  }
  return rows;
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << "support_fraction,t_direct,t_reference\n" << std::setprecision(17);
  for (const auto& r : rows) out << r.support_fraction << ',' << r.t_direct << ',' << r.t_reference << '\n';
}

std::vector<BenchmarkRow> read_benchmark_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "support_fraction,t_direct,t_reference") {
    throw CommandError("benchmark CSV: unexpected header");
  }
  std::vector<BenchmarkRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string a, b, d;
    if (!std::getline(cells, a, ',') || !std::getline(cells, b, ',') || !std::getline(cells, d)) {
      throw CommandError("benchmark CSV: malformed row '" + line + "'");
    }
    rows.push_back({std::stod(a), std::stod(b), std::stod(d)});
  }
  return rows;
}

void cmd_calibrate(const fs::path& out_file, std::ostream& log) {
  std::ostringstream text;
  text << "# c1 calibration of the corrected trapezoidal rule; first block is authoritative\n";
  for (double k : {1.0, 5.0}) {
    const auto cal = forward::calibrate_c1(k);
    text << forward::format_calibration(cal) << "\n";
    log << "calibrate: k = " << k << " c1 = " << std::setprecision(17) << cal.c1 << " min order "
        << std::setprecision(4) << cal.min_order << "\n";
  }
  auto out = open_out(out_file);
  out << text.str();
}

void cmd_resume() {
  throw UnsupportedCommand("resume: checkpoint/resume is not supported; start a new run with the same seed instead");
}

}  // namespace cloudscat::cli
