#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "cloudscat/forward.hpp"

namespace cloudscat::forward {

namespace {
// Below this reciprocal condition estimate the reduced system is reported
// as singular (interior resonance or b close to -1).
constexpr double kMinRcond = 1e-13;
}  // namespace

struct DirectSolver::Impl {
  Grid2D grid;
  double scale;  // h^2 k^2
  std::vector<std::size_t> support;
  std::vector<int> sx, sy;       // lattice coordinates of the support nodes
  std::vector<double> contrast;  // b on the support
  QuadratureWeights weights;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  double rcond = 1.0;

  Impl(const ScattererField& field, const QuadratureWeights& w)
      : grid(field.grid()), scale(w.h() * w.h() * w.k() * w.k()), support(field.support()), weights(w) {
    if (w.n() < grid.n() || std::abs(w.h() - grid.h()) > 1e-15 * grid.h()) {
      throw std::invalid_argument("DirectSolver: quadrature weights do not match the grid");
    }
    const auto n = static_cast<Eigen::Index>(support.size());
    contrast.reserve(support.size());
    for (auto idx : support) {
      contrast.push_back(field[idx]);
      sx.push_back(grid.j1(idx));
      sy.push_back(grid.j2(idx));
    }
    if (n == 0) return;
    lu.compute(assemble());
    rcond = lu.rcond();
    if (!(rcond > kMinRcond) || !std::isfinite(rcond)) {
      throw SolverError("DirectSolver: reduced system is singular to working precision (rcond = " +
                            std::to_string(rcond) + ")",
                        rcond);
    }
  }

  // I + h^2 k^2 Phi_{p-q} b_q on the support.
  Eigen::MatrixXcd assemble() const {
    const auto n = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index q = 0; q < n; ++q) {
      const int qx = sx[q];
      const int qy = sy[q];
      const cplx col_scale = scale * contrast[q];
      for (Eigen::Index p = 0; p < n; ++p) {
        const cplx v = col_scale * weights.phi(sx[p] - qx, sy[p] - qy);
        m(p, q) = p == q ? v + 1.0 : v;
      }
    }
    return m;
  }

  Eigen::VectorXcd support_solution(const ComplexField& incident) const {
    if (!(incident.grid == grid)) throw std::invalid_argument("DirectSolver: incident field on another grid");
    const auto n = static_cast<Eigen::Index>(support.size());
    Eigen::VectorXcd rhs(n);
    for (Eigen::Index p = 0; p < n; ++p) rhs(p) = incident[support[p]];
    return lu.solve(rhs);
  }

  // u_j = u^i_j - h^2 k^2 sum_{l in support} Phi_{j-l} b_l u_l
  cplx potential(const ComplexField& incident, const Eigen::VectorXcd& bu, std::size_t node) const {
    const int jx = grid.j1(node);
    const int jy = grid.j2(node);
    cplx acc{};
    for (std::size_t q = 0; q < support.size(); ++q) {
      acc += weights.phi(jx - sx[q], jy - sy[q]) * bu(static_cast<Eigen::Index>(q));
    }
    return incident[node] - scale * acc;
  }
};

DirectSolver::DirectSolver(const ScattererField& field, const QuadratureWeights& weights)
    : impl_(std::make_unique<Impl>(field, weights)) {}
DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

std::size_t DirectSolver::support_size() const { return impl_->support.size(); }
double DirectSolver::rcond() const { return impl_->rcond; }

ComplexField DirectSolver::solve(const ComplexField& incident) const {
  const auto& im = *impl_;
  ComplexField out = incident;
  if (im.support.empty()) return out;
  const Eigen::VectorXcd u = im.support_solution(incident);
  Eigen::VectorXcd bu(u.size());
  for (Eigen::Index q = 0; q < u.size(); ++q) bu(q) = im.contrast[static_cast<std::size_t>(q)] * u(q);
  std::vector<bool> on_support(im.grid.size(), false);
  for (std::size_t q = 0; q < im.support.size(); ++q) {
    on_support[im.support[q]] = true;
    out.values[im.support[q]] = u(static_cast<Eigen::Index>(q));
  }
  for (std::size_t j = 0; j < im.grid.size(); ++j) {
    if (!on_support[j]) out.values[j] = im.potential(incident, bu, j);
  }
  return out;
}

std::vector<cplx> DirectSolver::solve_at(const ComplexField& incident, std::span<const std::size_t> nodes) const {
  const auto& im = *impl_;
  std::vector<cplx> out(nodes.size());
  if (im.support.empty()) {
    for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = incident[nodes[i]];
    return out;
  }
  const Eigen::VectorXcd u = im.support_solution(incident);
  Eigen::VectorXcd bu(u.size());
  for (Eigen::Index q = 0; q < u.size(); ++q) bu(q) = im.contrast[static_cast<std::size_t>(q)] * u(q);
  // Support nodes take the solved value; support is sorted by flat index.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::size_t node = nodes[i];
    const auto it = std::lower_bound(im.support.begin(), im.support.end(), node);
    if (it != im.support.end() && *it == node) {
      out[i] = u(static_cast<Eigen::Index>(it - im.support.begin()));
    } else {
      out[i] = im.potential(incident, bu, node);
    }
  }
  return out;
}

std::vector<cplx> DirectSolver::reduced_matrix() const {
  const Eigen::MatrixXcd m = impl_->assemble();
  std::vector<cplx> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index p = 0; p < m.rows(); ++p) {
    for (Eigen::Index q = 0; q < m.cols(); ++q) out[static_cast<std::size_t>(p * m.cols() + q)] = m(p, q);
  }
  return out;
}

ComplexField solve_direct(const ScattererField& field, double k, const ComplexField& incident,
                          const Grid2D& grid) {
  if (!(field.grid() == grid)) throw std::invalid_argument("solve_direct: field is on another grid");
  if (field.support().empty()) return incident;
  const QuadratureWeights weights(k, grid);
  return DirectSolver(field, weights).solve(incident);
}

}  // namespace cloudscat::forward
