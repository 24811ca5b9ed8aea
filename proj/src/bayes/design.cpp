#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cloudscat/bayes.hpp"

namespace cloudscat::bayes {

std::vector<Point2> incident_directions(double zeta, int count) {
  if (count < 1) throw ContractError("incident_directions: count must be >= 1");
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / count + zeta;
    out.push_back({std::cos(angle), std::sin(angle)});
  }
  return out;
}

std::vector<Point2> default_observation_points(const Grid2D& grid, const Box& exclude, int stride) {
  if (stride < 1) throw ContractError("default_observation_points: stride must be >= 1");
  std::vector<Point2> out;
  for (int j2 = 0; j2 <= grid.n(); j2 += stride) {
    for (int j1 = 0; j1 <= grid.n(); j1 += stride) {
      const Point2 p = grid.node(j1, j2);
      if (!exclude.contains(p)) out.push_back(p);
    }
  }
  return out;
}

ObservationDesign ObservationDesign::standard(std::vector<Point2> points, double zeta, double sigma_low,
                                              double sigma_high) {
  ObservationDesign d;
  d.points = std::move(points);
  d.directions = incident_directions(zeta);
  d.zeta = zeta;
  d.sigma_low = sigma_low;
  d.sigma_high = sigma_high;
  for (std::size_t i = 0; i < d.directions.size(); ++i) {
    d.wavenumbers.push_back((i + 1) % 2 == 0 ? d.k_high : d.k_low);
  }
  d.check();
  return d;
}

void ObservationDesign::check() const {
  if (points.empty()) throw ContractError("ObservationDesign: no observation points");
  if (directions.empty()) throw ContractError("ObservationDesign: no incident directions");
  if (wavenumbers.size() != directions.size()) {
    throw ContractError("ObservationDesign: one wavenumber per direction required");
  }
  for (const auto& d : directions) {
    if (std::abs(norm(d) - 1.0) > 1e-12) throw ContractError("ObservationDesign: direction is not a unit vector");
  }
  for (double k : wavenumbers) {
    if (k != k_low && k != k_high) throw ContractError("ObservationDesign: wavenumber outside {k_low, k_high}");
  }
  if (!(k_low > 0.0) || !(k_high > 0.0)) throw ContractError("ObservationDesign: wavenumbers must be > 0");
  if (!(sigma_low > 0.0) || !(sigma_high > 0.0)) throw ContractError("ObservationDesign: sigma must be > 0");
}

void write_observations_csv(std::ostream& out, const Observations& obs, const ObservationDesign& design) {
  if (obs.directions != design.direction_count() || obs.points != design.point_count() ||
      obs.data.size() != obs.directions * obs.points) {
    throw ContractError("write_observations_csv: observations do not match the design");
  }
  out << "direction_index,wavenumber,x1,x2,re,im\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < obs.directions; ++i) {
    for (std::size_t j = 0; j < obs.points; ++j) {
      const cplx v = obs.value(i, j);
      out << (i + 1) << ',' << design.wavenumbers[i] << ',' << design.points[j].x << ',' << design.points[j].y
          << ',' << v.real() << ',' << v.imag() << '\n';
    }
  }
}

Observations read_observations_csv(std::istream& in, const ObservationDesign& design) {
  std::string line;
  if (!std::getline(in, line) || line != "direction_index,wavenumber,x1,x2,re,im") {
    throw ContractError("read_observations_csv: missing or unexpected header");
  }
  Observations obs;
  obs.directions = design.direction_count();
  obs.points = design.point_count();
  obs.data.assign(obs.directions * obs.points, cplx{});
  std::vector<bool> seen(obs.data.size(), false);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    std::istringstream fields(line);
    std::string cell;
    double v[6];
    for (double& x : v) {
      if (!std::getline(fields, cell, ',')) throw ContractError("read_observations_csv: short row " + std::to_string(row));
      x = std::stod(cell);
    }
    const auto i = static_cast<long>(v[0]) - 1;
    if (i < 0 || static_cast<std::size_t>(i) >= obs.directions || v[0] != static_cast<double>(i + 1)) {
      throw ContractError("read_observations_csv: direction index out of range in row " + std::to_string(row));
    }
    if (v[1] != design.wavenumbers[static_cast<std::size_t>(i)]) {
      throw ContractError("read_observations_csv: wavenumber does not match the design in row " + std::to_string(row));
    }
    // Rows are written point-major within each direction; accept any order.
    std::size_t j = obs.points;
    for (std::size_t p = 0; p < obs.points; ++p) {
      if (std::abs(design.points[p].x - v[2]) <= 1e-12 && std::abs(design.points[p].y - v[3]) <= 1e-12) {
        j = p;
        break;
      }
    }
    if (j == obs.points) throw ContractError("read_observations_csv: point not in the design in row " + std::to_string(row));
    const std::size_t flat = static_cast<std::size_t>(i) * obs.points + j;
    if (seen[flat]) throw ContractError("read_observations_csv: duplicate sample in row " + std::to_string(row));
    seen[flat] = true;
    obs.data[flat] = {v[4], v[5]};
  }
  if (row != obs.data.size()) {
    throw ContractError("read_observations_csv: expected " + std::to_string(obs.data.size()) + " rows, found " +
                        std::to_string(row));
  }
  return obs;
}

void write_meta(std::ostream& out, const ObservationMeta& meta) {
  nlohmann::ordered_json j;
  j["seed"] = meta.seed;
  j["sigma_low"] = meta.sigma_low;
  j["sigma_high"] = meta.sigma_high;
  j["zeta"] = meta.zeta;
  j["noise_free"] = meta.noise_free;
  j["solver"] = meta.solver;
  j["grid_n"] = meta.grid_n;
  j["grid_h"] = meta.grid_h;
  j["grid_origin"] = {meta.grid_origin.x, meta.grid_origin.y};
  out << j.dump(2) << '\n';
}

ObservationMeta read_meta(std::istream& in) {
  const auto j = nlohmann::json::parse(in);
  ObservationMeta m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.sigma_low = j.at("sigma_low").get<double>();
  m.sigma_high = j.at("sigma_high").get<double>();
  m.zeta = j.at("zeta").get<double>();
  m.noise_free = j.at("noise_free").get<bool>();
  m.solver = j.at("solver").get<std::string>();
  m.grid_n = j.at("grid_n").get<int>();
  m.grid_h = j.at("grid_h").get<double>();
  m.grid_origin = {j.at("grid_origin").at(0).get<double>(), j.at("grid_origin").at(1).get<double>()};
  return m;
}

}  // namespace cloudscat::bayes
