#include <bit>
#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "cloudscat/forward.hpp"

namespace cloudscat::forward {
namespace {

// The FFTW planner is not re-entrant; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

long double dot_norm2(std::span<const cplx> v) {
  long double acc = 0.0L;
  for (const auto& x : v) acc += std::norm(x);
  return acc;
}

}  // namespace

struct ReferenceSolver::Impl {
  Grid2D grid;
  IterativeOptions options;
  std::vector<double> contrast;  // b on every node
  bool empty = true;
  int padded = 0;
  std::vector<cplx> kernel_hat;  // FFT of h^2 k^2 Phi on the padded torus
  fftw_plan forward_plan = nullptr;
  fftw_plan backward_plan = nullptr;

  Impl(const ScattererField& field, const QuadratureWeights& w, IterativeOptions opts)
      : grid(field.grid()), options(opts), contrast(field.values()), empty(field.support().empty()) {
    if (w.n() < grid.n() || std::abs(w.h() - grid.h()) > 1e-15 * grid.h()) {
      throw std::invalid_argument("ReferenceSolver: quadrature weights do not match the grid");
    }
    if (opts.restart < 1 || opts.max_iterations < 1 || !(opts.tolerance > 0.0)) {
      throw std::invalid_argument("ReferenceSolver: invalid iterative options");
    }
    const int n = grid.n();
    padded = static_cast<int>(std::bit_ceil(static_cast<unsigned>(2 * n + 1)));
    const std::size_t total = static_cast<std::size_t>(padded) * padded;
    kernel_hat.assign(total, cplx{});
    const double scale = w.h() * w.h() * w.k() * w.k();
    // Offsets d in [-N, N] wrap to d mod P; P >= 2N + 1 keeps them disjoint.
    for (int dy = -n; dy <= n; ++dy) {
      for (int dx = -n; dx <= n; ++dx) {
        const std::size_t row = static_cast<std::size_t>((dy + padded) % padded);
        const std::size_t col = static_cast<std::size_t>((dx + padded) % padded);
        kernel_hat[row * padded + col] = scale * w.phi(dx, dy);
      }
    }
    std::vector<cplx> scratch(total);
    std::lock_guard lock(planner_mutex());
    forward_plan = fftw_plan_dft_2d(padded, padded, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                    FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_plan = fftw_plan_dft_2d(padded, padded, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                     FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_execute_dft(forward_plan, as_fftw(kernel_hat.data()), as_fftw(kernel_hat.data()));
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward_plan) fftw_destroy_plan(forward_plan);
    if (backward_plan) fftw_destroy_plan(backward_plan);
  }

  // y = u + h^2 k^2 (Phi * (b u)) restricted to the grid.
  void apply(std::span<const cplx> u, std::span<cplx> y) const {
    const int side = grid.side();
    const std::size_t total = static_cast<std::size_t>(padded) * padded;
    std::vector<cplx> work(total, cplx{});
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) {
        const std::size_t idx = grid.index(c, r);
        work[static_cast<std::size_t>(r) * padded + c] = contrast[idx] * u[idx];
      }
    }
    fftw_execute_dft(forward_plan, as_fftw(work.data()), as_fftw(work.data()));
    for (std::size_t i = 0; i < total; ++i) work[i] *= kernel_hat[i];
    fftw_execute_dft(backward_plan, as_fftw(work.data()), as_fftw(work.data()));
    const double inv = 1.0 / static_cast<double>(total);
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) {
        const std::size_t idx = grid.index(c, r);
        y[idx] = u[idx] + inv * work[static_cast<std::size_t>(r) * padded + c];
      }
    }
  }

  // Restarted GMRES with modified Gram-Schmidt and Givens rotations.
  std::vector<cplx> gmres(std::span<const cplx> rhs, IterativeReport& report) const {
    const std::size_t n = rhs.size();
    const int m = options.restart;
    std::vector<cplx> x(rhs.begin(), rhs.end());
    std::vector<cplx> r(n), ax(n), w(n);
    const double rhs_norm = std::sqrt(static_cast<double>(dot_norm2(rhs)));
    if (rhs_norm == 0.0) return std::vector<cplx>(n, cplx{});
    std::vector<std::vector<cplx>> basis(m + 1, std::vector<cplx>(n));
    std::vector<cplx> hess(static_cast<std::size_t>((m + 1) * m));
    const auto H = [&](int i, int j) -> cplx& { return hess[static_cast<std::size_t>(i * m + j)]; };
    std::vector<cplx> cs(m), sn(m), g(m + 1);

    int iterations = 0;
    double rel = 0.0;
    while (true) {
      apply(x, ax);
      for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ax[i];
      const double beta = std::sqrt(static_cast<double>(dot_norm2(r)));
      rel = beta / rhs_norm;
      if (rel <= options.tolerance || iterations >= options.max_iterations) break;
      for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
      std::fill(g.begin(), g.end(), cplx{});
      g[0] = beta;
      int used = 0;
      for (int j = 0; j < m && iterations < options.max_iterations; ++j) {
        apply(basis[j], w);
        for (int i = 0; i <= j; ++i) {
          cplx hij{};
          for (std::size_t t = 0; t < n; ++t) hij += std::conj(basis[i][t]) * w[t];
          H(i, j) = hij;
          for (std::size_t t = 0; t < n; ++t) w[t] -= hij * basis[i][t];
        }
        const double wn = std::sqrt(static_cast<double>(dot_norm2(w)));
        H(j + 1, j) = wn;
        if (wn > 0.0) {
          for (std::size_t t = 0; t < n; ++t) basis[j + 1][t] = w[t] / wn;
        }
        for (int i = 0; i < j; ++i) {
          const cplx a = H(i, j);
          const cplx b = H(i + 1, j);
          H(i, j) = std::conj(cs[i]) * a + std::conj(sn[i]) * b;
          H(i + 1, j) = -sn[i] * a + cs[i] * b;
        }
        const cplx a = H(j, j);
        const cplx b = H(j + 1, j);
        const double denom = std::sqrt(std::norm(a) + std::norm(b));
        cs[j] = a / denom;
        sn[j] = b / denom;
        H(j, j) = denom;
        H(j + 1, j) = 0.0;
        g[j + 1] = -sn[j] * g[j];
        g[j] = std::conj(cs[j]) * g[j];
        ++iterations;
        used = j + 1;
        if (std::abs(g[j + 1]) / rhs_norm <= options.tolerance || wn == 0.0) break;
      }
      // Back substitution for the least-squares coefficients.
      std::vector<cplx> y(used);
      for (int i = used - 1; i >= 0; --i) {
        cplx acc = g[i];
        for (int k = i + 1; k < used; ++k) acc -= H(i, k) * y[k];
        y[i] = acc / H(i, i);
      }
      for (int k = 0; k < used; ++k) {
        for (std::size_t t = 0; t < n; ++t) x[t] += y[k] * basis[k][t];
      }
    }
    report.iterations = iterations;
    report.relative_residual = rel;
    if (rel > options.tolerance) {
      throw SolverError("ReferenceSolver: GMRES did not converge in " + std::to_string(iterations) +
                            " iterations (relative residual " + std::to_string(rel) + ")",
                        rel);
    }
    return x;
  }
};

ReferenceSolver::ReferenceSolver(const ScattererField& field, const QuadratureWeights& weights,
                                 IterativeOptions options)
    : impl_(std::make_unique<Impl>(field, weights, options)) {}
ReferenceSolver::~ReferenceSolver() = default;
ReferenceSolver::ReferenceSolver(ReferenceSolver&&) noexcept = default;
ReferenceSolver& ReferenceSolver::operator=(ReferenceSolver&&) noexcept = default;

int ReferenceSolver::padded_size() const { return impl_->padded; }

std::vector<cplx> ReferenceSolver::apply(std::span<const cplx> u) const {
  if (u.size() != impl_->grid.size()) throw std::invalid_argument("ReferenceSolver::apply: size mismatch");
  std::vector<cplx> y(u.size());
  impl_->apply(u, y);
  return y;
}

ComplexField ReferenceSolver::solve(const ComplexField& incident, IterativeReport* report) const {
  if (!(incident.grid == impl_->grid)) {
    throw std::invalid_argument("ReferenceSolver: incident field on another grid");
  }
  IterativeReport local;
  IterativeReport& rep = report ? *report : local;
  if (impl_->empty) {
    rep = {};
    return incident;
  }
  return ComplexField{incident.grid, impl_->gmres(incident.values, rep)};
}

ComplexField solve_reference(const ScattererField& field, double k, const ComplexField& incident,
                             const Grid2D& grid, IterativeOptions options) {
  if (!(field.grid() == grid)) throw std::invalid_argument("solve_reference: field is on another grid");
  if (field.support().empty()) return incident;
  const QuadratureWeights weights(k, grid);
  return ReferenceSolver(field, weights, options).solve(incident);
}

}  // namespace cloudscat::forward
