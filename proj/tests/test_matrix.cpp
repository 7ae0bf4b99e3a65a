#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "arplab/matrix.hpp"

using namespace arplab;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                     double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols, 0.0);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

}  // namespace

TEST_CASE("solve_linear identity returns the right-hand side") {
  const Matrix i3 = Matrix::identity(3);
  const Matrix c = Matrix::from_rows({{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}, {7.0, 8.0, 9.0}});
  const Matrix x = solve_linear(i3, c);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(x(i, j) == doctest::Approx(c(i, j)));
  }
}

TEST_CASE("solve_linear diagonal inverse") {
  const Matrix a = Matrix::from_rows({{2.0, 0.0}, {0.0, 4.0}});
  const Matrix x = solve_linear(a, Matrix::identity(2));
  CHECK(x(0, 0) == doctest::Approx(0.5));
  CHECK(x(1, 1) == doctest::Approx(0.25));
  CHECK(x(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("solve_linear two-state resolvent pair") {
  // (zeta n I - B^2) X = B^2 for the two-state example.
  const Matrix a = Matrix::from_rows({{0.75, 0.0}, {0.0, 0.75}});
  const Matrix c = Matrix::from_rows({{0.25, 0.0}, {0.0, 0.25}});
  const Matrix x = solve_linear(a, c);
  CHECK(x(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(x(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("solve_linear rejects singular input") {
  const Matrix a = Matrix::from_rows({{1.0, 2.0}, {2.0, 4.0}});
  CHECK_THROWS_AS(solve_linear(a, Matrix::identity(2)), SingularMatrix);
}

TEST_CASE("solve_linear residual on random systems") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 1 + rng() % 20;
    Matrix a = random_matrix(rng, n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 2.0;  // keep well-conditioned
    const Matrix c = random_matrix(rng, n, n);
    const Matrix x = solve_linear(a, c);
    const Matrix ax = multiply(a, x);
    double err = 0.0;
    for (std::size_t k = 0; k < ax.data().size(); ++k) {
      err = std::max(err, std::abs(ax.data()[k] - c.data()[k]));
    }
    CHECK(err <= 1e-8 * std::max(1.0, max_abs(c)));
  }
}

TEST_CASE("singular values of diagonal and nilpotent matrices") {
  const auto sv1 = singular_values(Matrix::from_rows({{3.0, 0.0}, {0.0, 1.0}}));
  CHECK(sv1[0] == doctest::Approx(3.0));
  CHECK(sv1[1] == doctest::Approx(1.0));

  const auto sv2 = singular_values(Matrix::from_rows({{0.0, 1.0}, {0.0, 0.0}}));
  CHECK(sv2[0] == doctest::Approx(1.0));
  CHECK(sv2[1] == doctest::Approx(0.0));

  const auto sv3 = singular_values(Matrix::from_rows({{0.25, 0.0}, {0.0, 0.25}}));
  CHECK(sv3[0] == doctest::Approx(0.25));
  CHECK(sv3[1] == doctest::Approx(0.25));
  CHECK(sv3[0] + sv3[1] == doctest::Approx(0.5));
}

TEST_CASE("singular values: descending, nonnegative, Frobenius identity") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t rows = 1 + rng() % 20;
    const std::size_t cols = 1 + rng() % 20;
    const Matrix a = random_matrix(rng, rows, cols);
    const auto sv = singular_values(a);
    CHECK(sv.size() == std::min(rows, cols));
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < sv.size(); ++i) {
      CHECK(sv[i] >= 0.0);
      if (i) CHECK(sv[i] <= sv[i - 1]);
      sum_sq += sv[i] * sv[i];
    }
    const double fro = frobenius_norm(a);
    CHECK(sum_sq == doctest::Approx(fro * fro).epsilon(1e-8));
  }
}

TEST_CASE("jacobi and tridiagonal eigenvalue routes agree") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rng() % 79;
    Matrix s(n, n, 0.0);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = dist(rng);
        s(i, j) = v;
        s(j, i) = v;
      }
    }
    const auto ev_j = symmetric_eigenvalues(s);
    const auto ev_t = symmetric_eigenvalues_tridiagonal(s);
    REQUIRE(ev_j.size() == ev_t.size());
    const double scale = std::max(1.0, std::abs(ev_j.front()) + std::abs(ev_j.back()));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(ev_j[i] - ev_t[i]) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("spectral radius basics") {
  CHECK(spectral_radius(Matrix::identity(2)) == doctest::Approx(1.0));
  CHECK(spectral_radius(Matrix::from_rows({{0.25, 0.0}, {0.0, 0.25}})) ==
        doctest::Approx(0.25));
  // permutation squared is the identity
  const Matrix perm = Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
  CHECK(spectral_radius(multiply(perm, perm)) == doctest::Approx(1.0));
  // the permutation itself is periodic; the shift still finds rho = 1
  CHECK(spectral_radius(perm) == doctest::Approx(1.0));
}

TEST_CASE("spectral radius of nilpotent matrices is exactly zero") {
  CHECK(spectral_radius(Matrix::from_rows({{0.0, 1.0}, {0.0, 0.0}})) == 0.0);
  CHECK(spectral_radius(Matrix::from_rows({{0.0, 0.5, 0.0},
                                           {0.0, 0.0, 0.7},
                                           {0.0, 0.0, 0.0}})) == 0.0);
  CHECK(spectral_radius(Matrix(4, 4, 0.0)) == 0.0);
}

TEST_CASE("spectral radius bounded by the max row sum") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rng() % 25;
    const Matrix a = random_matrix(rng, n, n, 0.0, 1.0);
    const double rho = spectral_radius(a);
    CHECK(rho >= 0.0);
    CHECK(rho <= max_row_sum(a) + 1e-9);
  }
}

TEST_CASE("spectral radius rejects negative entries") {
  CHECK_THROWS_AS(spectral_radius(Matrix::from_rows({{-0.1, 0.0}, {0.0, 0.1}})),
                  InvalidArgument);
}

TEST_CASE("matrix invariants") {
  CHECK_THROWS_AS(Matrix(0, 3), InvalidArgument);
  Matrix bad(2, 2, 0.0);
  bad(0, 1) = std::nan("");
  CHECK_FALSE(bad.all_finite());
  CHECK_THROWS_AS(solve_linear(bad, Matrix::identity(2)), InvalidArgument);
  CHECK_THROWS_AS(multiply(Matrix(2, 3), Matrix(2, 3)), InvalidArgument);
}
