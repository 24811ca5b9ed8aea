#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cloudscat/config.hpp"

namespace cloudscat::config {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

// Reads the keys of one JSON object and rejects the ones nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), std::string("wrong type (") + e.what() + ")");
    }
  }

  Reader child(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Reader(j_.contains(key) ? j_.at(key) : empty, field(key));
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key.c_str()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_point(Reader& r, const char* key, Point2& p) {
  std::vector<double> xy{p.x, p.y};
  r.get(key, xy);
  if (xy.size() != 2) throw ConfigError(r.field(key), "expected [x, y]");
  p = {xy[0], xy[1]};
}

void read_grid(Reader r, GridSpec& g) {
  r.get("n", g.n);
  r.get("h", g.h);
  read_point(r, "origin", g.origin);
  r.finish();
}

ordered write_grid(const GridSpec& g) {
  return ordered{{"n", g.n}, {"h", g.h}, {"origin", {g.origin.x, g.origin.y}}};
}

}  // namespace

ExperimentConfig parse(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Reader r(root, "");
  r.get("name", c.name);
  read_grid(r.child("grid"), c.grid);
  read_grid(r.child("synth_grid"), c.synth_grid);
  {
    Reader s = r.child("scatterer");
    s.get("curve", c.scatterer.curve);
    s.get("scatterer_scale", c.scatterer.scatterer_scale);
    s.get("b", c.scatterer.b);
    s.get("samples", c.scatterer.samples);
    s.get("points_file", c.scatterer.points_file);
    s.finish();
  }
  {
    Reader d = r.child("design");
    d.get("zeta", c.design.zeta);
    d.get("k_low", c.design.k_low);
    d.get("k_high", c.design.k_high);
    d.get("sigma_low", c.design.sigma_low);
    d.get("sigma_high", c.design.sigma_high);
    d.get("observation_stride", c.design.observation_stride);
    d.get("observation_nodes", c.design.observation_nodes);
    d.finish();
  }
  {
    Reader p = r.child("prior");
    p.get("shape", c.prior.shape);
    p.get("rate", c.prior.rate);
    p.get("alpha_max", c.prior.alpha_max);
    p.finish();
  }
  {
    Reader k = r.child("kernel");
    k.get("weights", c.kernel.weights);
    k.get("t_max", c.kernel.t_max);
    k.get("burn_in", c.kernel.burn_in);
    k.get("seed", c.kernel.seed);
    k.get("mode", c.kernel.mode);
    k.get("snapshot_period", c.kernel.snapshot_period);
    k.get("cloud_size", c.kernel.cloud_size);
    k.get("samples_per_vertex", c.kernel.samples_per_vertex);
    k.finish();
  }
  {
    Reader s = r.child("synthesis");
    s.get("seed", c.synthesis.seed);
    s.get("noise_free", c.synthesis.noise_free);
    s.finish();
  }
  r.get("histogram_bins", c.histogram_bins);
  r.get("output", c.output);
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

std::string serialize(const ExperimentConfig& c) {
  ordered j;
  j["name"] = c.name;
  j["grid"] = write_grid(c.grid);
  j["synth_grid"] = write_grid(c.synth_grid);
  j["scatterer"] = ordered{{"curve", c.scatterer.curve},
                           {"scatterer_scale", c.scatterer.scatterer_scale},
                           {"b", c.scatterer.b},
                           {"samples", c.scatterer.samples},
                           {"points_file", c.scatterer.points_file}};
  j["design"] = ordered{{"zeta", c.design.zeta},
                        {"k_low", c.design.k_low},
                        {"k_high", c.design.k_high},
                        {"sigma_low", c.design.sigma_low},
                        {"sigma_high", c.design.sigma_high},
                        {"observation_stride", c.design.observation_stride},
                        {"observation_nodes", c.design.observation_nodes}};
  j["prior"] = ordered{{"shape", c.prior.shape}, {"rate", c.prior.rate}, {"alpha_max", c.prior.alpha_max}};
  j["kernel"] = ordered{{"weights", c.kernel.weights},
                        {"t_max", c.kernel.t_max},
                        {"burn_in", c.kernel.burn_in},
                        {"seed", c.kernel.seed},
                        {"mode", c.kernel.mode},
                        {"snapshot_period", c.kernel.snapshot_period},
                        {"cloud_size", c.kernel.cloud_size},
                        {"samples_per_vertex", c.kernel.samples_per_vertex}};
  j["synthesis"] = ordered{{"seed", c.synthesis.seed}, {"noise_free", c.synthesis.noise_free}};
  j["histogram_bins"] = c.histogram_bins;
  j["output"] = c.output;
  return j.dump(2) + "\n";
}

void ExperimentConfig::validate() const {
  const auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(field, what);
  };
  require(grid.n >= 8, "grid.n", "must be >= 8");
  require(grid.h > 0.0 && std::isfinite(grid.h), "grid.h", "must be > 0");
  require(synth_grid.n >= 8, "synth_grid.n", "must be >= 8");
  require(synth_grid.h > 0.0 && std::isfinite(synth_grid.h), "synth_grid.h", "must be > 0");
  require(synth_grid.build().refines(grid.build()), "synth_grid", "must contain every node of grid");
  require(synth_grid.h < grid.h, "synth_grid.h", "must be finer than grid.h (inverse-crime guard)");
  require(scatterer.curve == "kite" || scatterer.curve == "circle" || scatterer.curve == "polygon", "scatterer.curve",
          "must be kite, circle or polygon");
  require(scatterer.curve != "polygon" || !scatterer.points_file.empty(), "scatterer.points_file",
          "required for curve = polygon");
  require(scatterer.scatterer_scale > 0.0, "scatterer.scatterer_scale", "must be > 0");
  require(scatterer.b > 0.0 && std::isfinite(scatterer.b), "scatterer.b", "must be > 0");
  require(scatterer.samples >= 16, "scatterer.samples", "must be >= 16");
  require(std::isfinite(design.zeta), "design.zeta", "must be finite");
  require(design.k_low > 0.0, "design.k_low", "must be > 0");
  require(design.k_high > 0.0, "design.k_high", "must be > 0");
  require(design.sigma_low > 0.0, "design.sigma_low", "must be > 0");
  require(design.sigma_high > 0.0, "design.sigma_high", "must be > 0");
  require(design.observation_stride >= 1, "design.observation_stride", "must be >= 1");
  for (const auto& [j1, j2] : design.observation_nodes) {
    require(j1 >= 0 && j1 <= grid.n && j2 >= 0 && j2 <= grid.n, "design.observation_nodes", "node outside grid");
  }
  require(prior.shape > 0.0 && std::isfinite(prior.shape), "prior.shape", "must be > 0");
  require(prior.rate > 0.0 && std::isfinite(prior.rate), "prior.rate", "must be > 0");
  require(prior.alpha_max >= 0.0, "prior.alpha_max", "must be >= 0");
  require(kernel.mode == "exact-mh" || kernel.mode == "paper-literal", "kernel.mode",
          "must be exact-mh or paper-literal");
  require(histogram_bins >= 1, "histogram_bins", "must be >= 1");
  require(!output.empty(), "output", "must not be empty");
  try {
    kernel_config().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("kernel", e.what());
  }
}

bayes::Curve ExperimentConfig::true_curve() const {
  const double s = scatterer.scatterer_scale;
  if (scatterer.curve == "kite") return bayes::kite_curve(s);
  if (scatterer.curve == "circle") {
    return [s](double t) { return Point2{s * std::cos(t), s * std::sin(t)}; };
  }
  // Closed polygon read from file, traversed at uniform parameter per edge.
  std::ifstream in(scatterer.points_file);
  if (!in) throw ConfigError("scatterer.points_file", "cannot open " + scatterer.points_file);
  std::vector<Point2> pts;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("scatterer.points_file", "expected x,y rows");
    pts.push_back({s * std::stod(line.substr(0, comma)), s * std::stod(line.substr(comma + 1))});
  }
  if (pts.size() < 3) throw ConfigError("scatterer.points_file", "need at least 3 points");
  return [pts](double t) {
    const double u = t / (2.0 * std::numbers::pi) * static_cast<double>(pts.size());
    const auto i = static_cast<std::size_t>(std::floor(u)) % pts.size();
    const double f = u - std::floor(u);
    const Point2 a = pts[i];
    const Point2 b = pts[(i + 1) % pts.size()];
    return a + f * (b - a);
  };
}

bayes::ObservationDesign ExperimentConfig::design_for(const Grid2D& g) const {
  std::vector<Point2> points;
  if (design.observation_nodes.empty()) {
    const auto outline = bayes::sample_curve(true_curve(), scatterer.samples);
    points = bayes::default_observation_points(g, bayes::bounding_box(outline), design.observation_stride);
  } else {
    for (const auto& [j1, j2] : design.observation_nodes) points.push_back(g.node(j1, j2));
  }
  auto d = bayes::ObservationDesign::standard(std::move(points), design.zeta, design.sigma_low, design.sigma_high);
  d.k_low = design.k_low;
  d.k_high = design.k_high;
  for (std::size_t i = 0; i < d.wavenumbers.size(); ++i) d.wavenumbers[i] = (i + 1) % 2 == 0 ? d.k_high : d.k_low;
  d.check();
  return d;
}

bayes::PriorSpec ExperimentConfig::prior_spec() const {
  bayes::PriorSpec p;
  p.shape = prior.shape;
  p.rate = prior.rate;
  p.domain = grid.build().bounds();
  p.alpha_max = prior.alpha_max;
  return p;
}

mcmc::KernelConfig ExperimentConfig::kernel_config() const {
  mcmc::KernelConfig k;
  k.weights = kernel.weights;
  k.seed = kernel.seed;
  k.t_max = kernel.t_max;
  k.burn_in = kernel.burn_in;
  k.mode = mcmc::parse_mode(kernel.mode);
  k.snapshot_period = kernel.snapshot_period;
  k.cloud_size = kernel.cloud_size;
  k.samples_per_vertex = kernel.samples_per_vertex;
  return k;
}

std::vector<std::string> preset_names() { return {"example1", "example2", "example3", "desk", "desk-rotated"}; }

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  if (name == "example1" || name == "example2" || name == "example3") {
    c.kernel.t_max = 2000000;
    c.kernel.burn_in = 50000;
    if (name == "example2") c.design.zeta = std::numbers::pi / 6.0;
    if (name == "example3") {
      c.grid = {80, 0.01, {-0.4, -0.4}};
      c.synth_grid = {160, 0.005, {-0.4, -0.4}};
      // Same physical observation nodes as the N = 40 grid.
      c.design.observation_stride = 8;
    }
  } else if (name == "desk" || name == "desk-rotated") {
    c.kernel.t_max = 200000;
    c.kernel.burn_in = 20000;
    if (name == "desk-rotated") c.design.zeta = std::numbers::pi / 6.0;
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "'");
  }
  c.output = "out/" + name;
  c.validate();
  return c;
}

}  // namespace cloudscat::config
