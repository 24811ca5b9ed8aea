#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "cloudscat/config.hpp"

// Batch commands behind the command-line front end. Each writes CSV files
// with a one-line header into the configured output directory.

namespace cloudscat::cli {

namespace fs = std::filesystem;

class UnsupportedCommand : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CommandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ObservationFiles {
  fs::path csv;
  fs::path meta;
};

/// observations.csv and observations.meta.json in config.output.
ObservationFiles observation_paths(const fs::path& out_dir);

/// Synthetic data on the synthesis grid; deterministic given config.synthesis.seed.
ObservationFiles cmd_synthesize(const config::ExperimentConfig& config, std::ostream& log);

struct RunFiles {
  std::uint64_t seed = 0;
  fs::path chain;
  fs::path snapshots;
  fs::path log;
};

/// One chain per seed (an empty list uses config.kernel.seed); several seeds
/// run concurrently on separate threads with disjoint output files.
std::vector<RunFiles> cmd_run(const config::ExperimentConfig& config, const fs::path& observations,
                              const std::vector<std::uint64_t>& seeds, std::ostream& log);

struct SummaryFiles {
  fs::path table;
  fs::path area_histogram;
  fs::path b_histogram;
  fs::path trace;
  fs::path map_cloud;  // empty when no snapshot file sits next to the chain
};

/// Table (True / Conditional Mean / Maximum a posteriori), histograms, the
/// -energy trace and the snapshot nearest the MAP iteration, per chain file.
std::vector<SummaryFiles> cmd_summarize(const config::ExperimentConfig& config, const std::vector<fs::path>& chains,
                                        long burn_in, std::ostream& log);

struct BenchmarkRow {
  double support_fraction = 0.0;
  double t_direct = 0.0;     // seconds
  double t_reference = 0.0;  // seconds
  friend bool operator==(const BenchmarkRow&, const BenchmarkRow&) = default;
};

/// Disc scatterers of growing radius on the inference grid. Aborts with
/// CommandError before timing if the two solvers disagree by more than 1e-6.
std::vector<BenchmarkRow> cmd_benchmark(const config::ExperimentConfig& config, std::ostream& log,
                                        const std::vector<double>& radii = {});

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);
std::vector<BenchmarkRow> read_benchmark_csv(std::istream& in);

/// Recomputes c1 at k = 1 and k = 5 and writes the calibration tables.
void cmd_calibrate(const fs::path& out_file, std::ostream& log);

/// Checkpoint/resume is not provided; always throws UnsupportedCommand.
[[noreturn]] void cmd_resume();

}  // namespace cloudscat::cli
