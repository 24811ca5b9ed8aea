#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cloudscat/bayes.hpp"
#include "cloudscat/grid.hpp"
#include "cloudscat/mcmc.hpp"

// Experiment configuration: a JSON document with fixed key names. Unknown keys
// are rejected so that typos do not silently fall back to defaults.

namespace cloudscat::config {

/// Invalid configuration; `field` is the dotted key path at fault.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct GridSpec {
  int n = 40;
  double h = 0.02;
  Point2 origin{-0.4, -0.4};

  Grid2D build() const { return Grid2D(n, h, origin); }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct ScattererSpec {
  std::string curve = "kite";  // "kite", "circle" or "polygon"
  double scatterer_scale = 0.1;
  double b = 25.0;
  int samples = 10000;
  std::string points_file;  // "polygon": CSV `x,y` of the closed boundary
  friend bool operator==(const ScattererSpec&, const ScattererSpec&) = default;
};

struct DesignSpec {
  double zeta = 0.0;
  double k_low = bayes::kLowWavenumber;
  double k_high = bayes::kHighWavenumber;
  double sigma_low = 0.012;
  double sigma_high = 0.012;
  int observation_stride = 4;
  /// Explicit observation nodes (j1, j2) of the inference grid; empty selects
  /// every observation_stride-th node outside the scatterer's bounding box.
  std::vector<std::pair<int, int>> observation_nodes;
  friend bool operator==(const DesignSpec&, const DesignSpec&) = default;
};

struct PriorConfig {
  double shape = 2.0;
  double rate = 0.05;
  double alpha_max = 0.0;  // <= 0: diagonal of the inference grid
  friend bool operator==(const PriorConfig&, const PriorConfig&) = default;
};

struct KernelSpec {
  std::array<double, mcmc::kMoveCount> weights{0.4, 0.2, 0.2, 0.2};
  long t_max = 200000;
  long burn_in = 20000;
  std::uint64_t seed = 1;
  std::string mode = "exact-mh";
  long snapshot_period = 100;
  int cloud_size = 12;
  int samples_per_vertex = geometry::kSamplesPerVertex;
  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct SynthesisSpec {
  std::uint64_t seed = 2024;
  bool noise_free = false;
  friend bool operator==(const SynthesisSpec&, const SynthesisSpec&) = default;
};

struct ExperimentConfig {
  std::string name = "custom";
  GridSpec grid;
  GridSpec synth_grid{80, 0.01, {-0.4, -0.4}};
  ScattererSpec scatterer;
  DesignSpec design;
  PriorConfig prior;
  KernelSpec kernel;
  SynthesisSpec synthesis;
  int histogram_bins = 50;
  std::string output = "out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  bayes::Curve true_curve() const;
  bayes::ObservationDesign design_for(const Grid2D& grid) const;
  bayes::PriorSpec prior_spec() const;
  mcmc::KernelConfig kernel_config() const;
};

/// "example1", "example2", "example3", "desk", "desk-rotated".
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

ExperimentConfig parse(const std::string& json_text);
ExperimentConfig load(const std::filesystem::path& path);
std::string serialize(const ExperimentConfig& config);

}  // namespace cloudscat::config
