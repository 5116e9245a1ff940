#include <doctest.h>

#include "oracle.hpp"

#include <sse/spectral.hpp>

#include <random>

using sse::Complex;

namespace {

sse::ModelConfig linear(double lambda, std::size_t modes, double alpha = 0.0) {
  sse::ModelConfig c;
  c.alpha = alpha;
  c.modes = modes;
  c.nonlinearity = sse::Linear{lambda};
  c.q = sse::QSpec::flat(modes, 1.0);
  return c;
}

sse::ModelConfig with(sse::Nonlinearity f, std::size_t modes) {
  sse::ModelConfig c = linear(0.0, modes);
  c.nonlinearity = std::move(f);
  return c;
}

}  // namespace

TEST_CASE("eigenvalues of the damped Dirichlet Laplacian") {
  const double pi2 = oracle::pi * oracle::pi;
  CHECK(sse::eigenvalue(1, 0.0) == Complex(0.0, pi2));
  const Complex l2 = sse::eigenvalue(2, 1.0);
  CHECK(l2.real() == 1.0);
  CHECK(l2.imag() == doctest::Approx(39.47841760435743).epsilon(1e-15));
  CHECK(std::abs(sse::eigenvalue(1, 0.5)) == doctest::Approx(9.882261433194449).epsilon(1e-14));
  CHECK_THROWS_AS(sse::eigenvalue(0, 0.0), std::invalid_argument);
}

TEST_CASE("semigroup action") {
  sse::SpectralField u(std::vector<Complex>{1.0});
  SUBCASE("value for one mode") {
    // e^{-0.1} e^{-i pi^2 0.1}, evaluated independently (mpmath).
    const Complex s = sse::semigroup_apply(u, 0.1, 1.0)[0];
    CHECK(s.real() == doctest::Approx(0.49877214830338396).epsilon(1e-14));
    CHECK(s.imag() == doctest::Approx(-0.7549550298890716).epsilon(1e-14));
  }
  SUBCASE("t = 0 is the identity") {
    std::mt19937_64 rng(3);
    const auto v = oracle::random_field(rng, 6);
    CHECK(sse::semigroup_apply(v, 0.0, 2.0) == v);
  }
  SUBCASE("negative time rejected") { CHECK_THROWS_AS(sse::semigroup_apply(u, -1e-3, 0.0), std::invalid_argument); }
  SUBCASE("norm shrinks by exactly e^{-alpha t}") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const auto v = oracle::random_field(rng, 8);
      const double ratio = sse::h_norm(sse::semigroup_apply(v, 1.0, 2.0)) / sse::h_norm(v);
      CHECK(ratio == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    }
  }
  SUBCASE("semigroup property") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
      const auto v = oracle::random_field(rng, 5);
      const double s = U(rng), t = U(rng), a = U(rng);
      const auto lhs = sse::semigroup_apply(sse::semigroup_apply(v, s, a), t, a);
      const auto rhs = sse::semigroup_apply(v, s + t, a);
      CHECK(sse::h_norm(lhs - rhs) <= 1e-12 * sse::h_norm(rhs));
    }
  }
}

TEST_CASE("norms") {
  CHECK(sse::h_norm(sse::SpectralField(std::vector<Complex>{1.0, 0.0, 0.0})) == 1.0);
  const sse::SpectralField ones(std::vector<Complex>{1.0, 1.0});
  CHECK(sse::hs_norm(ones, 0.0, 0.3) == doctest::Approx(std::sqrt(2.0)));
  const sse::SpectralField e1(std::vector<Complex>{1.0, 0.0});
  CHECK(sse::hs_norm(e1, 2.0, 0.0) == doctest::Approx(oracle::pi * oracle::pi).epsilon(1e-14));
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto v = oracle::random_field(rng, 7);
    CHECK(sse::hs_norm(v, 0.0, 1.5) == sse::h_norm(v));
  }
}

TEST_CASE("nonlinearities") {
  const sse::SpectralField e1(std::vector<Complex>{1.0, 0.0});
  SUBCASE("linear scales mode-wise") {
    const auto f = sse::eval_nonlinearity(e1, linear(std::sqrt(2.0), 2));
    CHECK(f[0] == Complex(std::sqrt(2.0), 0.0));
    CHECK(f[1] == Complex(0.0, 0.0));
  }
  SUBCASE("F(0) = 0 for every kind") {
    const sse::SpectralField zero(4);
    for (const auto& cfg : {linear(1.3, 4), with(sse::Potential::sampled(4, [](double x) { return 1.0 + x; }), 4),
                            with(sse::SaturatedCubic{2.0}, 4)})
      CHECK(sse::h_norm(sse::eval_nonlinearity(zero, cfg)) == 0.0);
  }
  SUBCASE("constant potential is the identity multiplier") {
    const auto cfg = with(sse::Potential::sampled(2, [](double) { return 1.0; }), 2);
    const auto f = sse::eval_nonlinearity(e1, cfg);
    CHECK(std::abs(f[0] - 1.0) < 1e-14);
    CHECK(std::abs(f[1]) < 1e-14);
  }
  SUBCASE("collocation matches direct quadrature") {
    std::mt19937_64 rng(13);
    for (const auto& cfg : {with(sse::Potential::sampled(5, [](double x) { return std::cos(7.0 * x) - x; }, 17), 5),
                            with(sse::SaturatedCubic{-1.5}, 5)}) {
      const auto md = oracle::from(cfg);
      for (int i = 0; i < 10; ++i) {
        const auto u = oracle::random_field(rng, 5);
        const auto f = sse::eval_nonlinearity(u, cfg);
        CHECK(oracle::dist(oracle::F(md, oracle::Vec(u.begin(), u.end())), f) < 1e-12 * (1.0 + sse::h_norm(f)));
      }
    }
  }
}

TEST_CASE("Lipschitz bounds") {
  CHECK(sse::lipschitz_bound(linear(std::sqrt(2.0), 3)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(sse::lipschitz_bound(with(sse::Potential::sampled(3, [](double) { return 3.0; }), 3)) == 3.0);
  CHECK(sse::lipschitz_bound(with(sse::Potential::sampled(3, [](double x) { return -4.0 * x; }), 3)) ==
        doctest::Approx(4.0 * 7.0 / 8.0));
  CHECK(sse::lipschitz_bound(with(sse::SaturatedCubic{1.0}, 3)) == 2.0);
  CHECK(sse::lipschitz_bound(with(sse::SaturatedCubic{-1.5}, 3)) == 3.0);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> scale(0.01, 5.0);
  for (const auto& cfg : {linear(-2.5, 4), with(sse::Potential::sampled(4, [](double x) { return std::sin(9 * x); }), 4),
                          with(sse::SaturatedCubic{1.7}, 4)}) {
    const double L = sse::lipschitz_bound(cfg);
    for (int i = 0; i < 1000; ++i) {
      const auto v = oracle::random_field(rng, 4, scale(rng));
      const auto w = oracle::random_field(rng, 4, scale(rng));
      const double lhs = sse::h_norm(sse::eval_nonlinearity(v, cfg) - sse::eval_nonlinearity(w, cfg));
      CHECK(lhs <= L * sse::h_norm(v - w) + 1e-10);
    }
  }
}

TEST_CASE("gauge condition on the collocation grid") {
  std::mt19937_64 rng(19);
  for (const auto& cfg : {with(sse::Potential::sampled(6, [](double x) { return 2.0 - 3.0 * x * x; }), 6),
                          with(sse::SaturatedCubic{2.5}, 6)}) {
    const sse::NonlinearTerm F(cfg);
    REQUIRE(F.collocation() != nullptr);
    for (int i = 0; i < 50; ++i) {
      const auto grid = F.collocation()->synthesize(oracle::random_field(rng, 6, 2.0));
      CHECK(std::abs(F.collocation()->inner(grid, F.pointwise(grid)).imag()) <= 1e-12);
    }
  }
}

TEST_CASE("collocation round trip") {
  std::mt19937_64 rng(23);
  const sse::Collocation c(6, 13);
  const auto u = oracle::random_field(rng, 6);
  CHECK(sse::h_norm(c.analyze(c.synthesize(u)) - u) < 1e-13);
  CHECK(c.node(0) == doctest::Approx(1.0 / 14.0));
  CHECK_THROWS_AS(sse::Collocation(6, 5), std::invalid_argument);
}

TEST_CASE("config validation") {
  auto c = linear(1.0, 3);
  CHECK_NOTHROW(c.validate());
  c.alpha = -0.1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = linear(1.0, 3);
  c.theta = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = linear(1.0, 3);
  c.q = sse::QSpec::flat(2, 1.0);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = with(sse::Potential{std::vector<double>(4, 1.0)}, 3);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(with(sse::SaturatedCubic{1.0}, 2).linear_lambda(), std::invalid_argument);
}

TEST_CASE("grid times line up across coarse boundaries") {
  const sse::TimeGrid g{1.7, 13, 7};
  for (int n = 0; n < g.N; ++n) CHECK(g.time(n, g.J) == g.time(n + 1, 0));
  CHECK(g.coarse_time(g.N) == doctest::Approx(g.T).epsilon(1e-15));
  CHECK_THROWS_AS((sse::TimeGrid{1.0, 0, 1}.validate()), std::invalid_argument);
}

TEST_CASE("field arithmetic rejects length mismatch") {
  sse::SpectralField a(2), b(3);
  CHECK_THROWS_AS(a += b, std::invalid_argument);
  CHECK(sse::QSpec::poly_decay(3, 1.0, 1.0).amplitudes == std::vector<double>{1.0, 0.5, 1.0 / 3.0});
}
