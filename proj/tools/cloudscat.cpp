#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cloudscat/commands.hpp"
#include "cloudscat/config.hpp"

namespace {

using namespace cloudscat;

struct Options {
  std::string config_path;
  std::string preset;
  std::vector<std::uint64_t> seeds;
  std::string out;
  long burn_in = -1;
  long t_max = -1;
  std::string mode;
  std::string observations;
  std::vector<std::string> chains;
  std::string calibration_out = "data/c1.calibration";
};

config::ExperimentConfig resolve(const Options& o, bool chain_seed) {
  if (!o.config_path.empty() && !o.preset.empty()) {
    throw config::ConfigError("--config/--preset", "give at most one of them");
  }
  config::ExperimentConfig c = !o.config_path.empty() ? config::load(o.config_path)
                                                      : config::preset(o.preset.empty() ? "desk" : o.preset);
  if (!o.out.empty()) c.output = o.out;
  if (!o.mode.empty()) c.kernel.mode = o.mode;
  if (o.t_max > 0) {
    c.kernel.t_max = o.t_max;
    if (o.burn_in < 0) c.kernel.burn_in = o.t_max / 10;
  }
  if (o.burn_in >= 0) c.kernel.burn_in = o.burn_in;
  if (!o.seeds.empty()) {
    if (chain_seed) {
      c.kernel.seed = o.seeds.front();
    } else {
      c.synthesis.seed = o.seeds.front();
    }
  }
  c.validate();
  return c;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "Experiment configuration (JSON)");
  cmd->add_option("--preset", o.preset, "Shipped preset: example1, example2, example3, desk, desk-rotated");
  cmd->add_option("--out", o.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-cloud Bayesian inverse scattering workbench"};
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synthesize", "Generate synthetic near-field observations");
  add_common(synth, o);
  synth->add_option("--seed", o.seeds, "Noise seed")->expected(1);

  auto* run = app.add_subcommand("run", "Run the Metropolis-Hastings sampler");
  add_common(run, o);
  run->add_option("--seed", o.seeds, "Chain seed; repeat for concurrent chains");
  run->add_option("--observations", o.observations, "Observations CSV (default <out>/observations.csv)");
  run->add_option("--burn-in", o.burn_in, "Burn-in iterations");
  run->add_option("--t-max", o.t_max, "Number of iterations");
  run->add_option("--mode", o.mode, "Acceptance rule")->check(CLI::IsMember({"exact-mh", "paper-literal"}));

  auto* summarize = app.add_subcommand("summarize", "Posterior summaries of chain files");
  add_common(summarize, o);
  summarize->add_option("--chain", o.chains, "Chain CSV files (default <out>/chain_seed<seed>.csv)");
  summarize->add_option("--seed", o.seeds, "Chain seeds used to locate default chain files");
  summarize->add_option("--burn-in", o.burn_in, "Burn-in iterations to discard");

  auto* bench = app.add_subcommand("benchmark", "Time the direct and reference solvers");
  add_common(bench, o);

  auto* calibrate = app.add_subcommand("calibrate", "Recompute the diagonal correction constant");
  calibrate->add_option("--out", o.calibration_out, "Calibration table path");

  auto* resume = app.add_subcommand("resume", "Not supported");
  resume->allow_extras();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      cli::cmd_synthesize(resolve(o, false), std::cout);
    } else if (*run) {
      const auto c = resolve(o, true);
      const auto obs = o.observations.empty() ? cli::observation_paths(c.output).csv : cli::fs::path(o.observations);
      cli::cmd_run(c, obs, o.seeds, std::cout);
    } else if (*summarize) {
      const auto c = resolve(o, true);
      std::vector<cli::fs::path> chains(o.chains.begin(), o.chains.end());
      if (chains.empty()) {
        const auto seeds = o.seeds.empty() ? std::vector{c.kernel.seed} : o.seeds;
        for (auto s : seeds) chains.push_back(cli::fs::path(c.output) / ("chain_seed" + std::to_string(s) + ".csv"));
      }
      cli::cmd_summarize(c, chains, o.burn_in >= 0 ? o.burn_in : c.kernel.burn_in, std::cout);
    } else if (*bench) {
      const auto c = resolve(o, true);
      const auto rows = cli::cmd_benchmark(c, std::cout);
      const auto path = cli::fs::path(c.output) / "benchmark.csv";
      cli::fs::create_directories(path.parent_path());
      std::ofstream out(path);
      if (!out) throw cli::CommandError("cannot write " + path.string());
      cli::write_benchmark_csv(out, rows);
      std::cout << "benchmark: wrote " << path.string() << "\n";
    } else if (*calibrate) {
      cli::cmd_calibrate(o.calibration_out, std::cout);
    } else if (*resume) {
      cli::cmd_resume();
    }
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cli::UnsupportedCommand& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
