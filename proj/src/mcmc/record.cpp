#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cloudscat/mcmc.hpp"

namespace cloudscat::mcmc {
namespace {

Move parse_move(const std::string& s) {
  for (int i = 0; i < kMoveCount; ++i) {
    if (s == to_string(static_cast<Move>(i))) return static_cast<Move>(i);
  }
  throw std::invalid_argument("unknown move '" + s + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

void expect_header(std::istream& in, const char* header) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw std::invalid_argument(std::string("expected CSV header '") + header + "'");
  }
}

}  // namespace

void write_chain_csv(std::ostream& out, const ChainRecord& record) {
  out << "iter,move,accepted,energy,b,alpha,area\n" << std::setprecision(17);
  for (const auto& r : record.rows) {
    out << r.iter << ',' << to_string(r.move) << ',' << (r.accepted ? 1 : 0) << ',' << r.energy << ',' << r.b << ','
        << r.alpha << ',' << r.area << '\n';
  }
}

std::vector<IterationRecord> read_chain_csv(std::istream& in) {
  expect_header(in, "iter,move,accepted,energy,b,alpha,area");
  std::vector<IterationRecord> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 7) throw std::invalid_argument("chain CSV: expected 7 fields in '" + line + "'");
    rows.push_back({std::stol(f[0]), parse_move(f[1]), f[2] == "1", std::stod(f[3]), std::stod(f[4]),
                    std::stod(f[5]), std::stod(f[6])});
  }
  return rows;
}

void write_snapshots_csv(std::ostream& out, const std::vector<Snapshot>& snapshots) {
  out << "iter,alpha,b,x,y\n" << std::setprecision(17);
  for (const auto& s : snapshots) {
    for (const auto& p : s.points) out << s.iter << ',' << s.alpha << ',' << s.b << ',' << p.x << ',' << p.y << '\n';
  }
}

std::vector<Snapshot> read_snapshots_csv(std::istream& in) {
  expect_header(in, "iter,alpha,b,x,y");
  std::vector<Snapshot> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 5) throw std::invalid_argument("snapshot CSV: expected 5 fields in '" + line + "'");
    const long iter = std::stol(f[0]);
    if (out.empty() || out.back().iter != iter) out.push_back({iter, std::stod(f[1]), std::stod(f[2]), {}});
    out.back().points.push_back({std::stod(f[3]), std::stod(f[4])});
  }
  return out;
}

Histogram histogram(const std::vector<double>& values, double lo, double hi, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  Histogram h{lo, hi, std::vector<long>(static_cast<std::size_t>(bins), 0)};
  const double width = hi - lo;
  for (double v : values) {
    if (!(v >= lo && v <= hi)) continue;
    auto i = width > 0.0 ? static_cast<long>((v - lo) / width * bins) : 0L;
    i = std::clamp(i, 0L, static_cast<long>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(i)];
  }
  return h;
}

Summary summarize(const std::vector<IterationRecord>& rows, long burn_in, int bins,
                  std::pair<double, double> area_range, std::pair<double, double> b_range) {
  if (burn_in < 0 || static_cast<std::size_t>(burn_in) >= rows.size()) {
    throw std::invalid_argument("summarize: burn-in must be smaller than the chain length");
  }
  Summary s;
  std::vector<double> areas, bs;
  long double sum_area = 0.0L, sum_b = 0.0L;
  const IterationRecord* best = nullptr;
  for (auto it = rows.begin() + burn_in; it != rows.end(); ++it) {
    areas.push_back(it->area);
    bs.push_back(it->b);
    sum_area += it->area;
    sum_b += it->b;
    if (!best || it->energy < best->energy) best = &*it;
    s.trace.emplace_back(it->iter, -it->energy);
  }
  s.samples = static_cast<long>(areas.size());
  const auto n = static_cast<long double>(s.samples);
  s.cm_area = static_cast<double>(sum_area / n);
  s.cm_b = static_cast<double>(sum_b / n);
  long double ss = 0.0L;
  for (double b : bs) ss += (b - s.cm_b) * (b - s.cm_b);
  s.var_b = s.samples > 1 ? static_cast<double>(ss / (n - 1)) : 0.0;
  s.map_area = best->area;
  s.map_b = best->b;
  s.map_energy = best->energy;
  s.map_iter = best->iter;
  const auto range = [](const std::vector<double>& v, std::pair<double, double> r) {
    if (r.first < r.second) return r;
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    return std::pair{*mn, *mx};
  };
  const auto ar = range(areas, area_range);
  const auto br = range(bs, b_range);
  s.area_hist = histogram(areas, ar.first, ar.second, bins);
  s.b_hist = histogram(bs, br.first, br.second, bins);
  return s;
}

}  // namespace cloudscat::mcmc
