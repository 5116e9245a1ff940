#include <doctest.h>

#include "oracle.hpp"

#include <sse/noise.hpp>
#include <sse/philox.hpp>
#include <sse/spectral.hpp>

#include <sstream>

using sse::Complex;

namespace {

struct Moments {
  double mean = 0, var = 0, se_mean = 0, se_var = 0;
};

Moments moments(const std::vector<double>& xs) {
  Moments r;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) r.mean += x;
  r.mean /= n;
  std::vector<double> d2;
  for (double x : xs) d2.push_back((x - r.mean) * (x - r.mean));
  for (double d : d2) r.var += d;
  r.var /= n - 1;
  double v4 = 0;
  for (double d : d2) v4 += (d - r.var) * (d - r.var);
  r.se_mean = std::sqrt(r.var / n);
  r.se_var = std::sqrt(v4 / (n - 1) / n);
  return r;
}

sse::ModelConfig linear(double lambda, std::size_t modes, double alpha, sse::QSpec q) {
  sse::ModelConfig c;
  c.alpha = alpha;
  c.modes = modes;
  c.nonlinearity = sse::Linear{lambda};
  c.q = std::move(q);
  return c;
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using sse::philox::generate;
  CHECK(generate({0, 0, 0, 0}, {0, 0}) == sse::philox::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        sse::philox::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        sse::philox::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniform mapping stays inside (0, 1)") {
  CHECK(sse::philox::to_open_unit(0, 0) > 0.0);
  CHECK(sse::philox::to_open_unit(0xffffffffu, 0xffffffffu) < 1.0);
}

TEST_CASE("noise paths are reproducible") {
  const sse::TimeGrid g{1.0, 5, 3};
  const auto a = sse::NoisePath::sample(g, 4, 42);
  CHECK(a == sse::NoisePath::sample(g, 4, 42));
  CHECK(a == sse::NoisePath::sample(g, 4, 42, 4));
  CHECK(!(a == sse::NoisePath::sample(g, 4, 43)));
  // A single entry regenerates from its key alone.
  const double sd = std::sqrt(g.fine_step());
  CHECK(a.fine_increment(3, 2, 1) == sd * sse::standard_complex_normal(42, 3, 2, 1, sse::Stream::Increment));
  CHECK_THROWS_AS(a.fine_increment(5, 0, 0), std::out_of_range);
  CHECK(sse::derive_seed(1, 0) != sse::derive_seed(1, 1));
  CHECK(sse::derive_seed(1, 0) != sse::derive_seed(2, 0));
}

TEST_CASE("coarse increments are sums of fine increments") {
  const sse::TimeGrid g{2.0, 3, 4};
  const auto p = sse::NoisePath::sample(g, 3, 9);
  for (int n = 0; n < g.N; ++n)
    for (std::size_t m = 0; m < 3; ++m) {
      Complex s = 0.0;
      for (int j = 0; j < g.J; ++j) s += p.fine_increment(n, j, m);
      CHECK(p.coarse_increment(n, m) == s);
    }
  const auto one = sse::NoisePath::sample({1.0, 2, 1}, 2, 9);
  CHECK(one.coarse_increment(1, 1) == one.fine_increment(1, 0, 1));
  const sse::NoisePath ones(1, 4, 1, 0, std::vector<Complex>(4, Complex(1.0, 0.0)));
  CHECK(sse::coarse_increment(ones, 0, 0) == Complex(4.0, 0.0));
  CHECK_THROWS_AS(sse::NoisePath(1, 4, 1, 0, std::vector<Complex>(3)), std::invalid_argument);
}

TEST_CASE("increment distribution" * doctest::description("Monte Carlo, 3 standard errors")) {
  const int S = 100000;
  const sse::TimeGrid g{0.5, 2, 2};
  const double dt = g.fine_step(), dT = g.coarse_step();
  std::vector<double> re, im, sq, rel_re, coarse_sq, cross;
  for (int s = 0; s < S; ++s) {
    const auto p = sse::NoisePath::sample(g, 2, sse::derive_seed(77, s));
    const Complex d = p.fine_increment(1, 1, 1);
    re.push_back(d.real());
    im.push_back(d.imag());
    sq.push_back(std::norm(d));
    rel_re.push_back((d * d).real());
    coarse_sq.push_back(std::norm(p.coarse_increment(0, 0)));
    cross.push_back(d.real() * p.fine_increment(1, 0, 1).real());
  }
  const auto mre = moments(re), mim = moments(im), msq = moments(sq), mrel = moments(rel_re), mc = moments(coarse_sq);
  CHECK(std::abs(mre.mean) <= 3 * std::sqrt(dt / S));
  CHECK(std::abs(mim.mean) <= 3 * mim.se_mean);
  CHECK(std::abs(msq.mean - 2 * dt) <= 3 * msq.se_mean);
  CHECK(std::abs(mrel.mean) <= 3 * mrel.se_mean);
  CHECK(std::abs(mc.mean - 2 * dT) <= 3 * mc.se_mean);
  // Independence of neighbouring steps: sample correlation within 3 / sqrt(S).
  CHECK(std::abs(moments(cross).mean / (mre.var)) <= 3.0 / std::sqrt(static_cast<double>(S)));
}

TEST_CASE("apply_sqrt_q") {
  const std::vector<Complex> dW{1.0, 1.0};
  CHECK(sse::h_norm(sse::apply_sqrt_q(sse::QSpec::zero(2), dW)) == 0.0);
  CHECK(sse::apply_sqrt_q(sse::QSpec::flat(2, 1.0), dW) == sse::SpectralField(dW));
  const auto y = sse::apply_sqrt_q(sse::QSpec::poly_decay(2, 1.0, 1.0), dW);
  CHECK(y[0] == Complex(1.0));
  CHECK(y[1] == Complex(0.5));
  CHECK_THROWS_AS(sse::apply_sqrt_q(sse::QSpec::flat(3, 1.0), dW), std::invalid_argument);
}

TEST_CASE("phi1 is accurate near zero") {
  for (double r : {1e-1, 1e-4, 1e-8, 1e-12}) {
    const Complex z(r, -2.0 * r);
    // Taylor series through z^4; the remainder is below |z|^5 / 720.
    const Complex series = 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0 + z * z * z * z / 120.0;
    CHECK(std::abs(sse::phi1(z) - series) < std::pow(std::abs(z), 5) / 600.0 + 1e-15);
  }
  CHECK(sse::phi1(0.0) == Complex(1.0));
  const Complex z(2.0, 30.0);
  CHECK(std::abs(sse::phi1(z) - (1.0 - std::exp(-z)) / z) < 1e-15);
}

TEST_CASE("joint OU increments" * doctest::description("Monte Carlo, 3 standard errors")) {
  const double lambda = 0.7, q = 1.3;
  const auto cfg = linear(lambda, 1, 1.0, sse::QSpec::flat(1, q));
  const sse::TimeGrid g{0.5, 1, 1};
  const double dt = g.fine_step();

  SUBCASE("zero noise amplitude gives zero convolution") {
    const auto c0 = linear(lambda, 1, 1.0, sse::QSpec::zero(1));
    const auto p = sse::NoisePath::sample(g, 1, 1);
    CHECK(sse::joint_ou_increments(p, 0, 0, c0, g, lambda)[0].zeta == Complex(0.0));
  }
  SUBCASE("second moments") {
    const int S = 100000;
    std::vector<double> z2, xr, xi;
    for (int s = 0; s < S; ++s) {
      const auto p = sse::NoisePath::sample(g, 1, sse::derive_seed(5, s));
      const auto o = sse::joint_ou_increments(p, 0, 0, cfg, g, lambda)[0];
      z2.push_back(std::norm(o.zeta));
      const Complex x = o.zeta * std::conj(q * o.dbeta);
      xr.push_back(x.real());
      xi.push_back(x.imag());
    }
    // Ito isometry: q^2 (1 - e^{-2 alpha dt}) / alpha with alpha = 1, dt = 0.5.
    const double ez2 = q * q * (1.0 - std::exp(-1.0));
    const auto m2 = moments(z2);
    CHECK(std::abs(m2.mean - ez2) <= 3 * m2.se_mean);
    // Cross moment 2 q^2 int_0^dt e^{-kappa (dt - s)} ds = 2 q^2 dt (1 - e^{-kappa dt}) / (kappa dt).
    const Complex kappa = sse::eigenvalue(1, 1.0) - Complex(0.0, lambda);
    const Complex target = 2.0 * q * q * (1.0 - std::exp(-kappa * dt)) / kappa;
    const auto mr = moments(xr), mi = moments(xi);
    CHECK(std::abs(mr.mean - target.real()) <= 3 * mr.se_mean);
    CHECK(std::abs(mi.mean - target.imag()) <= 3 * mi.se_mean);
  }
  SUBCASE("sampler bookkeeping") {
    const sse::OuIncrementSampler s(cfg, dt, lambda);
    CHECK(s.convolution_variance(0) == doctest::Approx(q * q * (1.0 - std::exp(-1.0))).epsilon(1e-14));
    const double resid = s.convolution_variance(0) - std::norm(s.regression(0)) * q * q * 2.0 * dt;
    CHECK(s.residual_sd(0) * s.residual_sd(0) == doctest::Approx(resid).epsilon(1e-12));
    const auto c_alpha0 = linear(lambda, 1, 0.0, sse::QSpec::flat(1, q));
    CHECK(sse::OuIncrementSampler(c_alpha0, dt, lambda).convolution_variance(0) ==
          doctest::Approx(q * q * 2.0 * dt).epsilon(1e-14));
  }
  SUBCASE("nonlinear configs are rejected") {
    auto c = cfg;
    c.nonlinearity = sse::SaturatedCubic{1.0};
    const auto p = sse::NoisePath::sample(g, 1, 1);
    CHECK_THROWS_AS(sse::joint_ou_increments(p, 0, 0, c, g, lambda), std::invalid_argument);
  }
}

TEST_CASE("binary dump and load") {
  const auto p = sse::NoisePath::sample({1.0, 2, 3}, 2, 0x0123456789abcdefULL);
  std::stringstream ss;
  p.dump(ss);
  const std::string bytes = ss.str();
  REQUIRE(bytes.size() == 4 * 8 + 2 * 3 * 2 * 16);
  CHECK(static_cast<unsigned char>(bytes[0]) == 2);  // N, little endian
  CHECK(static_cast<unsigned char>(bytes[24]) == 0xef);  // seed low byte
  std::stringstream in(bytes);
  CHECK(sse::NoisePath::load(in) == p);
  std::stringstream truncated(bytes.substr(0, 40));
  CHECK_THROWS(sse::NoisePath::load(truncated));
}
