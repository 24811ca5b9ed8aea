#pragma once

#include <complex>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cloudscat/grid.hpp"

// Lippmann-Schwinger solvers on a uniform grid.
//
// The volume potential k^2 int Phi(k|x - y|) b(y) u(y) dy is discretized by the
// trapezoidal rule with a corrected diagonal weight beta1 absorbing the
// logarithmic singularity of Phi(r) = -(i/4) H0^(1)(r):
//
//   u_j + h^2 k^2 sum_l Phi_{j-l} b_l u_l = u^i_j,
//   Phi_j = Phi(k |j| h) for j != 0,  Phi_0 = beta1,
//   beta1 = -i/4 + (ln(h k / 2) + gamma + c1) / (2 pi).

namespace cloudscat::forward {

using cplx = std::complex<double>;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a linear solve cannot be trusted; carries the reciprocal
/// condition estimate (direct) or the final residual (iterative).
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double diagnostic)
      : std::runtime_error(what), diagnostic_(diagnostic) {}
  double diagnostic() const { return diagnostic_; }

 private:
  double diagnostic_;
};

/// Diagonal correction constant, calibrated by calibrate_c1() and recorded
/// with its convergence table in data/c1.calibration.
inline constexpr double kC1 = -1.3105329141197493;

/// Phi(r) = -(i/4) H0^(1)(r), r > 0.
cplx green_phi(double r);

/// beta1 for spacing h, wavenumber k and correction constant c1.
cplx beta1(double h, double k, double c1 = kC1);

/// Phi_{j,h} for every lattice offset reachable on a grid, with beta1 at the
/// origin. Offsets are stored by (|dx|, |dy|).
class QuadratureWeights {
 public:
  QuadratureWeights(double k, const Grid2D& grid, double c1 = kC1);

  double k() const { return k_; }
  double h() const { return h_; }
  double c1() const { return c1_; }
  int n() const { return n_; }
  cplx beta1() const { return table_[0]; }
  cplx phi(int dx, int dy) const {
    const int ax = dx < 0 ? -dx : dx;
    const int ay = dy < 0 ? -dy : dy;
    return table_[static_cast<std::size_t>(ay) * (n_ + 1) + ax];
  }

 private:
  double k_;
  double h_;
  double c1_;
  int n_;
  std::vector<cplx> table_;
};

/// e^{i k x . d} at every node; |d| must be 1 within 1e-12.
ComplexField incident_plane_wave(Point2 direction, double k, const Grid2D& grid);

/// LU factorization of the system restricted to the support of b.
///
/// Columns of the discrete operator vanish off the support, so the support
/// values are solved for first and every other node follows from the
/// discrete volume potential. Immutable once built; solve() may be called
/// concurrently.
class DirectSolver {
 public:
  /// Throws SolverError when the reduced matrix is numerically singular.
  DirectSolver(const ScattererField& field, const QuadratureWeights& weights);
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  std::size_t support_size() const;
  /// Reciprocal condition number estimate of the reduced matrix (1 when empty).
  double rcond() const;

  /// Total field on every node.
  ComplexField solve(const ComplexField& incident) const;

  /// Total field at selected nodes only.
  std::vector<cplx> solve_at(const ComplexField& incident, std::span<const std::size_t> nodes) const;

  /// Reduced matrix (I + K) on the support, row/column order = field.support().
  std::vector<cplx> reduced_matrix() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ComplexField solve_direct(const ScattererField& field, double k, const ComplexField& incident,
                          const Grid2D& grid);

struct IterativeOptions {
  int restart = 30;
  int max_iterations = 500;
  double tolerance = 1e-8;  // relative residual
};

struct IterativeReport {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Matrix-free reference route: (I + K) applied through FFT circulant
/// convolution on a zero-padded power-of-two grid, solved by restarted GMRES.
class ReferenceSolver {
 public:
  ReferenceSolver(const ScattererField& field, const QuadratureWeights& weights,
                  IterativeOptions options = {});
  ~ReferenceSolver();
  ReferenceSolver(ReferenceSolver&&) noexcept;
  ReferenceSolver& operator=(ReferenceSolver&&) noexcept;

  int padded_size() const;

  /// Throws SolverError on non-convergence.
  ComplexField solve(const ComplexField& incident, IterativeReport* report = nullptr) const;

  /// y = (I + K) u on the full grid.
  std::vector<cplx> apply(std::span<const cplx> u) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ComplexField solve_reference(const ScattererField& field, double k, const ComplexField& incident,
                             const Grid2D& grid, IterativeOptions options = {});

/// Relative l2 distance ||a - b|| / ||b|| over all nodes.
double relative_l2(const ComplexField& a, const ComplexField& b);

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CalibrationRow {
  double h;
  double c1_estimate;  // value that makes the rule exact at this h
  double error;        // |rule(h; c1) - reference| with the final c1
  double order;        // observed order against the previous row (0 for the first)
};

struct Calibration {
  double k;
  double c1;
  double reference;  // |oracle integral|
  std::vector<CalibrationRow> rows;
  double min_order;
};

/// Spacings used by the calibration, coarse to fine.
inline constexpr double kCalibrationSpacings[] = {0.04, 0.02, 0.01, 0.005};
inline constexpr double kRequiredOrder = 3.5;

/// Calibrates c1 on int Phi(k|y|) g(y) dy over [-0.5, 0.5]^2, g a Gaussian
/// bump of width 0.06 (below 1e-15 at the box edge), against tanh-sinh
/// quadrature of the radial integral. Throws CalibrationError when the
/// corrected rule falls short of order 3.5.
Calibration calibrate_c1(double k);

/// Convergence table of the corrected rule for a given c1 (no fitting).
Calibration check_c1(double k, double c1);

/// Plain-text fixture: "c1 <value>" then the table rows.
std::string format_calibration(const Calibration& cal);
double read_calibrated_c1(const std::string& path);

}  // namespace cloudscat::forward
