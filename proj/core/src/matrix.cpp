#include "arplab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

namespace arplab {

namespace {

constexpr double kPivotTol = 1e-12;

void require_finite(const Matrix& m, const char* what) {
  if (!m.all_finite()) {
    throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
  }
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c, 0.0);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw InvalidArgument("from_rows: ragged rows");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

bool Matrix::all_finite() const {
  for (double v : a_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool Matrix::all_nonnegative() const {
  for (double v : a_) {
    if (!(v >= 0.0)) return false;
  }
  return true;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("multiply: shape mismatch");
  require_finite(a, "multiply");
  require_finite(b, "multiply");
  Matrix c(a.rows(), b.cols(), 0.0);
  const std::size_t n = b.cols();
  // ikj order: the inner loop runs over contiguous rows of b and c. Zero
  // entries of a are skipped, which makes products of sparse-in-dense
  // transition matrices cheap.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

double trace(const Matrix& a) {
  if (!a.is_square()) throw InvalidArgument("trace: matrix not square");
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_row_sum(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const double* r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(r[j]);
    m = std::max(m, s);
  }
  return m;
}

Matrix solve_linear(const Matrix& a, const Matrix& c) {
  if (!a.is_square()) throw InvalidArgument("solve_linear: A not square");
  if (c.rows() != a.rows()) throw InvalidArgument("solve_linear: shape mismatch");
  require_finite(a, "solve_linear");
  require_finite(c, "solve_linear");

  const std::size_t n = a.rows();
  Matrix lu = a;
  Matrix x = c;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < kPivotTol) {
      throw SingularMatrix("solve_linear: pivot " + std::to_string(best) +
                           " below tolerance at column " + std::to_string(k));
    }
    if (p != k) {
      std::swap_ranges(lu.row(k), lu.row(k) + n, lu.row(p));
      std::swap_ranges(x.row(k), x.row(k) + x.cols(), x.row(p));
    }
    const double inv_piv = 1.0 / lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = lu(i, k) * inv_piv;
      if (l == 0.0) continue;
      lu(i, k) = l;
      double* ri = lu.row(i);
      const double* rk = lu.row(k);
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
      double* xi = x.row(i);
      const double* xk = x.row(k);
      for (std::size_t j = 0; j < x.cols(); ++j) xi[j] -= l * xk[j];
    }
  }

  // Back substitution on the row block.
  for (std::size_t kk = n; kk-- > 0;) {
    double* xk = x.row(kk);
    const double inv = 1.0 / lu(kk, kk);
    for (std::size_t j = 0; j < x.cols(); ++j) xk[j] *= inv;
    for (std::size_t i = 0; i < kk; ++i) {
      const double u = lu(i, kk);
      if (u == 0.0) continue;
      double* xi = x.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) xi[j] -= u * xk[j];
    }
  }
  return x;
}

std::vector<double> symmetric_eigenvalues(Matrix s, double tol) {
  if (!s.is_square()) throw InvalidArgument("symmetric_eigenvalues: not square");
  const std::size_t n = s.rows();
  if (n == 1) return {s(0, 0)};

  const double scale = frobenius_norm(s);
  if (scale == 0.0) return std::vector<double>(n, 0.0);
  const double off_target = tol * scale;

  const std::size_t max_sweeps = 100 * n;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
    }
    off = std::sqrt(2.0 * off);
    if (off <= off_target) {
      std::vector<double> d(n);
      for (std::size_t i = 0; i < n; ++i) d[i] = s(i, i);
      std::sort(d.begin(), d.end());
      return d;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double spq = s(p, q);
        if (spq == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * spq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cth = 1.0 / std::sqrt(t * t + 1.0);
        const double sth = t * cth;
        const double spp = s(p, p);
        const double sqq = s(q, q);
        s(p, p) = spp - t * spq;
        s(q, q) = sqq + t * spq;
        s(p, q) = 0.0;
        s(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double skp = s(k, p);
          const double skq = s(k, q);
          s(k, p) = cth * skp - sth * skq;
          s(p, k) = s(k, p);
          s(k, q) = sth * skp + cth * skq;
          s(q, k) = s(k, q);
        }
      }
    }
  }
  throw ConvergenceFailure("symmetric_eigenvalues: Jacobi sweeps exceeded cap");
}

std::vector<double> symmetric_eigenvalues_tridiagonal(Matrix s) {
  if (!s.is_square()) throw InvalidArgument("symmetric_eigenvalues: not square");
  const std::size_t n = s.rows();
  if (n == 1) return {s(0, 0)};

  std::vector<double> d(n, 0.0);
  std::vector<double> e(n, 0.0);

  // Householder reduction to tridiagonal form, accumulating no transforms.
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(s(i, k));
      if (scale == 0.0) {
        e[i] = s(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          s(i, k) /= scale;
          h += s(i, k) * s(i, k);
        }
        double f = s(i, l);
        const double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        s(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          double gg = 0.0;
          for (std::size_t k = 0; k <= j; ++k) gg += s(j, k) * s(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) gg += s(k, j) * s(i, k);
          e[j] = gg / h;
          f += e[j] * s(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = s(i, j);
          const double gg = e[j] - hh * f;
          e[j] = gg;
          for (std::size_t k = 0; k <= j; ++k) {
            s(j, k) -= f * e[k] + gg * s(i, k);
          }
        }
      }
    } else {
      e[i] = s(i, l);
    }
  }
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) d[i] = s(i, i);

  // Implicit QL with shifts on the tridiagonal (d, e).
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 64) {
          throw ConvergenceFailure("symmetric_eigenvalues: QL iteration cap reached");
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double sn = 1.0;
        double cs = 1.0;
        double p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = sn * e[i];
          const double bb = cs * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          sn = f / r;
          cs = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * sn + 2.0 * cs * bb;
          p = sn * r;
          d[i + 1] = g + p;
          g = cs * r - bb;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

std::vector<double> singular_values(const Matrix& a) {
  require_finite(a, "singular_values");
  const std::size_t m = std::min(a.rows(), a.cols());

  // Gram matrix of the smaller side; its eigenvalues are the squared
  // singular values.
  Matrix g = (a.rows() >= a.cols()) ? multiply(transpose(a), a)
                                    : multiply(a, transpose(a));
  std::vector<double> ev = g.rows() > 64
                               ? symmetric_eigenvalues_tridiagonal(std::move(g))
                               : symmetric_eigenvalues(std::move(g), 1e-10);

  std::vector<double> sv(m);
  for (std::size_t i = 0; i < m; ++i) {
    sv[i] = std::sqrt(std::max(0.0, ev[m - 1 - i]));
  }
  return sv;
}

namespace {

// Drops indices that cannot lie on a cycle: repeatedly removes rows and
// columns that are entirely zero on the surviving index set. What remains
// carries the spectral radius; an empty remainder means the matrix is
// nilpotent.
std::vector<std::size_t> cycle_core(const Matrix& a) {
  const std::size_t n = a.rows();
  std::vector<bool> alive(n, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      bool row_zero = true;
      bool col_zero = true;
      for (std::size_t j = 0; j < n && (row_zero || col_zero); ++j) {
        if (!alive[j]) continue;
        if (a(i, j) != 0.0) row_zero = false;
        if (a(j, i) != 0.0) col_zero = false;
      }
      if (row_zero || col_zero) {
        alive[i] = false;
        changed = true;
      }
    }
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) keep.push_back(i);
  }
  return keep;
}

}  // namespace

SpectralBounds spectral_radius_bounds(const Matrix& a, double tol,
                                      std::size_t max_iter) {
  if (!a.is_square()) throw InvalidArgument("spectral_radius: not square");
  require_finite(a, "spectral_radius");
  if (!a.all_nonnegative()) {
    throw InvalidArgument("spectral_radius: matrix has negative entries");
  }

  const std::vector<std::size_t> keep = cycle_core(a);
  if (keep.empty()) return {0.0, 0.0, 0.0, true};
  const std::size_t n = keep.size();

  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = a(keep[i], keep[j]);
  }

  // Diagonal shift: keeps iterates positive and de-periodizes cycles. The
  // shift moves every eigenvalue by exactly s, so it is subtracted back out.
  const double s = 0.5 * std::max(max_row_sum(m), kPivotTol);
  for (std::size_t i = 0; i < n; ++i) m(i, i) += s;

  SpectralBounds out;
  double ub = std::numeric_limits<double>::infinity();
  double lb = 0.0;

  std::vector<double> x(n, 1.0);
  std::vector<double> y(n, 0.0);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* ri = m.row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += ri[j] * x[j];
      y[i] = acc;
    }
    // Collatz-Wielandt: for positive x, min_i (Mx)_i/x_i <= rho(M) <= max_i.
    double rmin = std::numeric_limits<double>::infinity();
    double rmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] / x[i];
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
    ub = std::min(ub, rmax);
    lb = std::max(lb, rmin);

    double lambda = 0.0;
    for (double v : y) lambda = std::max(lambda, v);
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      resid = std::max(resid, std::abs(y[i] - lambda * x[i]));
    }
    out.estimate = lambda - s;
    out.lower = std::max(0.0, lb - s);
    out.upper = std::max(0.0, ub - s);
    if (resid <= tol * lambda || ub - lb <= tol * std::max(ub, kPivotTol)) {
      out.converged = true;
      return out;
    }
    const double inv = 1.0 / lambda;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] * inv;
  }
  return out;
}

double spectral_radius(const Matrix& a, double tol, std::size_t max_iter) {
  const SpectralBounds b = spectral_radius_bounds(a, tol, max_iter);
  if (!b.converged) {
    throw ConvergenceFailure("spectral_radius: no convergence within iteration cap");
  }
  return b.estimate;
}

}  // namespace arplab
