#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "arplab/error.hpp"

namespace arplab {

// Dense row-major matrix of doubles. Kept deliberately small: the theory
// needs a linear solve, singular values, a spectral radius, traces and norms,
// nothing else.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {
    if (rows == 0 || cols == 0) {
      throw InvalidArgument("Matrix dimensions must be at least 1x1");
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  // Convenience builder for tests and small fixtures.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  double* row(std::size_t i) { return a_.data() + i * cols_; }
  const double* row(std::size_t i) const { return a_.data() + i * cols_; }

  std::vector<double>& data() { return a_; }
  const std::vector<double>& data() const { return a_; }

  bool is_square() const { return rows_ == cols_; }
  bool all_finite() const;
  bool all_nonnegative() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
double trace(const Matrix& a);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);      // entrywise max-norm
double max_row_sum(const Matrix& a);  // max over rows of sum of |entries|

// Solves AX = C by Gaussian elimination with partial pivoting.
// Throws SingularMatrix when a pivot magnitude falls below 1e-12.
Matrix solve_linear(const Matrix& a, const Matrix& c);

// Singular values in descending order, length min(rows, cols), computed as
// square roots of the eigenvalues of the smaller Gram matrix (cyclic Jacobi
// sweeps). Throws ConvergenceFailure if sweeps exceed 100*n without meeting
// the 1e-10 off-diagonal tolerance.
std::vector<double> singular_values(const Matrix& a);

// Perron root of an entrywise nonnegative square matrix via power iteration
// from the all-ones vector. A diagonal shift breaks cycles; a peeling pass
// drops transient indices first so acyclic matrices return exactly 0.
// Converges when either the relative residual or the width of the rigorous
// two-sided Collatz-Wielandt interval reaches tol. Throws ConvergenceFailure
// when neither happens within max_iter steps.
double spectral_radius(const Matrix& a, double tol = 1e-10,
                       std::size_t max_iter = 100000);

// Power iteration that never throws on slow convergence: reports the best
// estimate together with a rigorous enclosure of rho accumulated from the
// Collatz-Wielandt ratios of every iterate. The enclosure is often decisive
// (e.g. for threshold checks) long before the iteration itself settles.
struct SpectralBounds {
  double estimate = 0.0;
  double lower = 0.0;  // rho >= lower always
  double upper = 0.0;  // rho <= upper always
  bool converged = false;
};
SpectralBounds spectral_radius_bounds(const Matrix& a, double tol = 1e-10,
                                      std::size_t max_iter = 100000);

// Eigenvalues of a symmetric matrix (ascending) by cyclic Jacobi rotations.
// Exposed for tests; singular_values is built on top of it.
std::vector<double> symmetric_eigenvalues(Matrix s, double tol = 1e-10);

// Same contract via Householder tridiagonalization plus implicit QL; much
// faster for large matrices. Tests cross-validate the two routes.
std::vector<double> symmetric_eigenvalues_tridiagonal(Matrix s);

}  // namespace arplab
