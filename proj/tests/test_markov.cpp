#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "arplab/markov.hpp"
#include "test_support.hpp"

using namespace arplab;

TEST_CASE("vocabulary basics") {
  const Vocabulary v = Vocabulary::collect({{"b", "a"}, {"c", "a"}});
  CHECK(v.size() == 3);
  CHECK(v.tokens == std::vector<std::string>{"a", "b", "c"});
  CHECK(v.eos_id() == 3);
  CHECK(v.id_of("b") == 1);
  CHECK_THROWS_AS(v.id_of("zz"), UnknownToken);
  CHECK_THROWS_AS(Vocabulary::from_tokens({"a", "a"}), InvalidArgument);
}

TEST_CASE("build_model counts bigrams with one EOS event per sequence") {
  const Vocabulary v = Vocabulary::collect({{"a", "b"}});

  SUBCASE("two identical sequences") {
    const TransitionModel m = build_model({{"a", "b"}, {"a", "b"}}, v);
    CHECK(m.b(0, 0) == 0.0);
    CHECK(m.b(0, 1) == 1.0);
    CHECK(m.eos[0] == 0.0);
    CHECK(m.b(1, 0) == 0.0);
    CHECK(m.b(1, 1) == 0.0);
    CHECK(m.eos[1] == 1.0);
    CHECK(m.zeta == doctest::Approx(0.25));
  }

  SUBCASE("single-token sequence always ends") {
    const Vocabulary va = Vocabulary::collect({{"a"}});
    const TransitionModel m = build_model({{"a"}}, va);
    CHECK(m.b(0, 0) == 0.0);
    CHECK(m.eos[0] == 1.0);
    CHECK(m.zeta == 0.0);
  }

  SUBCASE("alternating sequence") {
    const TransitionModel m = build_model({{"a", "b", "a", "b", "a", "b"}}, v);
    CHECK(m.b(0, 1) == doctest::Approx(1.0));
    CHECK(m.b(1, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(m.eos[1] == doctest::Approx(1.0 / 3.0));
    CHECK(m.eos[0] == 0.0);
  }

  SUBCASE("rows sum to one with the EOS column included") {
    std::mt19937_64 rng(5);
    const auto corpus = test_support::random_corpus(rng, 40, 8, 12);
    const Vocabulary vc = Vocabulary::collect(corpus);
    const TransitionModel m = build_model(corpus, vc);
    for (std::size_t i = 0; i < m.n(); ++i) {
      double s = m.eos[i];
      for (std::size_t j = 0; j < m.n(); ++j) s += m.b(i, j);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    std::size_t nnz = 0;
    for (double x : m.b.data()) nnz += x > 0.0 ? 1 : 0;
    CHECK(m.zeta == doctest::Approx(static_cast<double>(nnz) /
                                    (static_cast<double>(m.n()) * m.n())));
  }

  SUBCASE("unobserved vocabulary rows send all mass to EOS") {
    const Vocabulary vx = Vocabulary::from_tokens({"a", "b", "x"});
    const TransitionModel m = build_model({{"a", "b"}}, vx);
    CHECK(m.eos[2] == 1.0);
    for (std::size_t j = 0; j < 3; ++j) CHECK(m.b(2, j) == 0.0);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(build_model({}, v), EmptyCorpus);
    CHECK_THROWS_AS(build_model({{"a", "zz"}}, v), UnknownToken);
    CHECK_THROWS_AS(build_model({{}}, v), InvalidArgument);
  }
}

TEST_CASE("sparsity counts strictly positive entries") {
  CHECK(sparsity(Matrix(3, 3, 0.0)) == 0.0);
  CHECK(sparsity(Matrix::identity(4)) == doctest::Approx(0.25));
  CHECK(sparsity(Matrix::from_rows({{0.0, 0.5}, {0.5, 0.0}})) == doctest::Approx(0.5));
  CHECK_THROWS_AS(sparsity(Matrix::from_rows({{-0.5, 0.0}, {0.0, 0.0}})),
                  InvalidArgument);
}

TEST_CASE("arp_series on the hand examples") {
  SUBCASE("no transitions") {
    const TransitionModel m = model_from_matrix(Matrix(2, 2, 0.0));
    const ArpSeries r = arp_series(m);
    CHECK(r.value == 0.0);
    CHECK(r.converged);
  }

  SUBCASE("two-state geometric sum") {
    const TransitionModel m =
        model_from_matrix(Matrix::from_rows({{0.0, 0.5}, {0.5, 0.0}}));
    CHECK(m.zeta_n() == doctest::Approx(1.0));
    const ArpSeries r = arp_series(m, 10000, 1e-12);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
  }

  SUBCASE("deterministic cycle diverges") {
    const TransitionModel m =
        model_from_matrix(Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
    CHECK(m.zeta_n() == doctest::Approx(1.0));
    const ArpSeries r = arp_series(m, 50, 1e-12);
    CHECK_FALSE(r.converged);
    CHECK(r.terms_used == 50);
    // every term is tr(I) / 1 = 2
    CHECK(r.value == doctest::Approx(100.0));
  }
}

TEST_CASE("arp_closed_form on the hand examples") {
  CHECK(arp_closed_form(model_from_matrix(Matrix(3, 3, 0.0))) == 0.0);

  const TransitionModel two =
      model_from_matrix(Matrix::from_rows({{0.0, 0.5}, {0.5, 0.0}}));
  CHECK(arp_closed_form(two) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const TransitionModel cyc =
      model_from_matrix(Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
  CHECK_THROWS_AS(arp_closed_form(cyc), PreconditionViolated);
  try {
    arp_closed_form(cyc);
  } catch (const PreconditionViolated& e) {
    CHECK(e.lhs() == doctest::Approx(1.0));  // zeta n
    CHECK(e.rhs() == doctest::Approx(1.0));  // rho(B^2)
  }
}

TEST_CASE("closed form matches the series on random sub-stochastic models") {
  std::mt19937_64 rng(17);
  int done = 0;
  while (done < 60) {
    const TransitionModel m = test_support::random_substochastic_model(rng, 50, 0.95);
    if (m.zeta == 0.0) continue;
    const SpectralBounds rho = spectral_radius_bounds(multiply(m.b, m.b));
    if (!(m.zeta_n() >= 1.05 * rho.upper)) continue;
    ++done;
    const double closed = arp_closed_form(m);
    const ArpSeries series = arp_series(m, 10000, 1e-12);
    REQUIRE(series.converged);
    CHECK(std::abs(closed - series.value) <= 1e-8 * std::max(1.0, std::abs(closed)));
    CHECK(closed >= 0.0);
  }
}
