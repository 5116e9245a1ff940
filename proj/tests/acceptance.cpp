// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include "oracle.hpp"

#include <sse/analysis.hpp>
#include <sse/config.hpp>
#include <sse/harness.hpp>
#include <sse/parareal.hpp>
#include <sse/spectral.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using sse::Complex;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

sse::ExperimentConfig linear_experiment(double theta, double lambda, double alpha, std::size_t modes) {
  sse::ExperimentConfig c;
  c.model.alpha = alpha;
  c.model.theta = theta;
  c.model.modes = modes;
  c.model.lambda = lambda;
  c.seed = 20240601;
  return c;
}

// 1. k = N reproduces the fine reference on every path.
Outcome finite_termination() {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> Nd(1, 8), Jd(1, 4), Md(1, 4);
  double worst = 0.0;
  int runs = 0;
  for (int cfg = 0; cfg < 20; ++cfg) {
    const sse::TimeGrid g{1.0 + cfg % 3, Nd(rng), Jd(rng)};
    const std::size_t M = static_cast<std::size_t>(Md(rng));
    const int kind = cfg % 3;
    const auto c = oracle::random_model(rng, kind, M, g.coarse_step());
    for (int p = 0; p < 5; ++p) {
      const auto path = sse::NoisePath::sample(g, M, sse::derive_seed(100 + cfg, p));
      const auto u0 = oracle::random_field(rng, M);
      sse::PararealConfig pc;
      pc.k_max = g.N;
      pc.fine_kind = kind == 0 && p % 2 ? sse::FineKind::ExactLinear : sse::FineKind::ExpEuler;
      const auto h = sse::run_parareal(u0, path, c, g, pc);
      double scale = 1.0;
      for (const auto& v : h.reference) scale = std::max(scale, sse::h_norm(v));
      for (int n = 0; n <= g.N; ++n) worst = std::max(worst, sse::h_norm(h.iterates[g.N][n] - h.reference[n]) / scale);
      ++runs;
    }
  }
  return {worst <= 1e-12, fmt("%d paths over 20 configs, max relative error %.3g", runs, worst)};
}

// 2. Controller against a textbook double loop.
Outcome oracle_equivalence() {
  std::mt19937_64 rng(2);
  const sse::TimeGrid g{1.0, 4, 2};
  double worst = 0.0;
  int runs = 0;
  for (int kind = 0; kind < 3; ++kind)
    for (int trial = 0; trial < 10; ++trial) {
      const auto c = oracle::random_model(rng, kind, 2, g.coarse_step());
      const auto path = sse::NoisePath::sample(g, 2, sse::derive_seed(7, 10 * kind + trial));
      const auto u0 = oracle::random_field(rng, 2);
      sse::PararealConfig pc;
      pc.k_max = 4;
      pc.coarse.tol = 1e-15;
      const auto h = sse::run_parareal(u0, path, c, g, pc);
      const auto U = oracle::parareal(oracle::from(c), oracle::Vec(u0.begin(), u0.end()), path, g, 4);
      for (int k = 0; k <= 4; ++k)
        for (int n = 0; n <= g.N; ++n)
          worst = std::max(worst, oracle::dist(U[k][n], h.iterates[k][n]) / std::max(1.0, oracle::norm(U[k][n])));
      ++runs;
    }
  return {worst <= 1e-12, fmt("%d configs, all k <= 4, max relative difference %.3g", runs, worst)};
}

// 3. Order in dT at fixed k = 3.
Outcome order_reproduction() {
  bool ok = true;
  std::string detail;
  for (double theta : {0.0, 0.9, 0.5}) {
    auto c = linear_experiment(theta, std::sqrt(2.0), 1.0, 10);
    c.grid = {4.0, 16, 64};  // fine step 2^-8; the study resets N and J per dT
    c.fine_kind = sse::FineKind::ExactLinear;
    c.paths = 1000;
    c.study.kind = sse::StudyKind::OrderStudy;
    c.study.k = 3;
    c.k_max = 3;
    for (int i = 2; i <= 6; ++i) c.study.dT_list.push_back(std::ldexp(1.0, -i));
    const auto r = sse::order_study(c);
    const bool want_high = theta == 0.5;
    const bool pass = want_high ? (r.slope >= 5.0 && r.slope <= 7.0) : (r.slope >= 2.5 && r.slope <= 3.8);
    ok = ok && pass && !r.diverged;
    detail += fmt("theta=%g slope %.3f %s; ", theta, r.slope, want_high ? "[5,7]" : "[2.5,3.8]");
  }
  return {ok, detail};
}

// 4. Iterations needed to reach 1e-6 e_0.
Outcome iteration_count() {
  bool ok = true;
  std::string detail;
  for (auto [theta, limit] : {std::pair{0.5, 5}, std::pair{1.0, 8}}) {
    auto c = linear_experiment(theta, std::sqrt(2.0), 1.0, 10);
    c.grid = {1.0, 64, 4};  // dt = 2^-6, J = 4
    c.paths = 1000;
    c.k_max = limit;
    const auto t = sse::mc_error_vs_k(c);
    int reached = -1;
    for (const auto& row : t.rows)
      if (row.e_k <= 1e-6 * t.rows[0].e_k) {
        reached = row.k;
        break;
      }
    ok = ok && reached >= 0 && reached <= limit;
    detail += fmt("theta=%g e_0=%.3g reaches 1e-6 e_0 at k=%d (limit %d); ", theta, t.rows[0].e_k, reached, limit);
  }
  return {ok, detail};
}

// 5. Error growth in T outside the uniform regime.
Outcome divergence_regime() {
  double e[2];
  int i = 0;
  for (double T : {1.0, 20.0}) {
    auto c = linear_experiment(0.0, 5.0, 1.0, 10);
    c.grid = {T, static_cast<int>(T * 16), 4};
    c.paths = 1000;
    c.k_max = 3;
    e[i++] = sse::mc_error_vs_k(c).rows[3].e_k;
  }
  const double ratio = e[1] / e[0];
  return {ratio >= 10.0, fmt("e_3(T=1)=%.4g e_3(T=20)=%.4g ratio %.3g", e[0], e[1], ratio)};
}

// 6. Long-run ensemble against N(0, q^2/alpha, 0).
Outcome invariant_measure() {
  bool ok = true;
  double worst = 0.0;
  for (double theta : {0.5, 1.0}) {
    auto c = linear_experiment(theta, std::sqrt(2.0), 2.0, 4);
    c.grid = {1.0, 1024, 1};
    c.paths = 10000;
    c.study.kind = sse::StudyKind::Invariant;
    c.study.burn_in = 4.0;
    const double target = 1.0 / 2.0;  // q^2 / alpha
    for (const auto& row : sse::invariant_study(c)) {
      const auto& s = row.sample;
      const double z[3] = {(s.covariance - target) / s.se_cov, s.relation.real() / s.se_rel_re,
                           s.relation.imag() / s.se_rel_im};
      for (double x : z) {
        worst = std::max(worst, std::abs(x));
        ok = ok && std::abs(x) <= 3.0;
      }
    }
  }
  return {ok, fmt("theta in {1/2, 1}, M=4, 10^4 samples: max |z| = %.2f over cov and relation", worst)};
}

// 7. Ensemble moments after 10 steps against the moment recursion.
Outcome moment_oracle() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  bool ok = true;
  double worst = 0.0, closed_gap = 0.0;
  for (int cfg = 0; cfg < 5; ++cfg) {
    const double alpha = 0.2 + 1.8 * U(rng), lambda = 6 * U(rng) - 3, theta = U(rng);
    auto c = linear_experiment(theta, lambda, alpha, 2);
    c.model.q_scale = 0.5 + U(rng);
    c.model.u0_scale = 1.0;
    c.model.u0_sd = 0.5;
    c.grid = {1.0, 1, 1 + cfg % 3};
    c.grid.T = 0.05 + 0.15 * U(rng);
    c.paths = 20000;
    c.seed = 500 + cfg;
    c.study.kind = sse::StudyKind::MomentsCheck;
    c.study.n = 10;
    const double dT = c.grid.coarse_step(), th = c.model.theta, lam = c.model.lambda;
    // Independent recursion for mean, covariance and relation of each mode.
    const Complex e = Complex(1.0, (1 - th) * lam * dT) / Complex(1.0, -th * lam * dT);
    const Complex S = 1.0 / Complex(1.0, -th * lam * dT);
    std::vector<double> want;
    for (std::size_t m = 0; m < 2; ++m) {
      const Complex g = oracle::semigroup(m, c.model.alpha, dT);
      Complex mean = 1.0 / static_cast<double>(m + 1), rel = 0.25;
      double cov = 0.25;
      for (int n = 0; n < 10; ++n) {
        mean = e * g * mean;
        rel = e * e * g * g * rel;
        cov = std::norm(e * g) * cov + std::norm(S * g) * c.model.q_scale * c.model.q_scale * 2 * dT;
      }
      for (double v : {mean.real(), mean.imag(), cov, rel.real(), rel.imag()}) want.push_back(v);
    }
    const auto rows = sse::moments_check(c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      closed_gap = std::max(closed_gap, std::abs(rows[i].closed_form - want[i]) / std::max(1.0, std::abs(want[i])));
      const double z = (rows[i].empirical - want[i]) / rows[i].se;
      worst = std::max(worst, std::abs(z));
      ok = ok && std::abs(z) <= 3.0;
    }
  }
  ok = ok && closed_gap <= 1e-12;
  return {ok, fmt("5 configs x 2 modes x 5 statistics, 2*10^4 paths: max |z| = %.2f; closed form vs recursion %.2g",
                  worst, closed_gap)};
}

// 8. Per-path contraction bound for the linear model with exact fine flow.
Outcome per_path_bound() {
  bool ok = true;
  int checked = 0;
  double tightest = 0.0;
  const double lam = std::sqrt(2.0), alpha = 0.5;
  const sse::TimeGrid g{1.0, 10, 4};
  for (double theta : {0.5, 0.75, 1.0}) {
    sse::ModelConfig c;
    c.alpha = alpha;
    c.theta = theta;
    c.modes = 4;
    c.nonlinearity = sse::Linear{lam};
    c.q = sse::QSpec::flat(4, 1.0);
    sse::PararealConfig pc;
    pc.k_max = 3;
    pc.fine_kind = sse::FineKind::ExactLinear;
    for (int p = 0; p < 200; ++p) {
      const auto path = sse::NoisePath::sample(g, 4, sse::derive_seed(88, p));
      sse::SpectralField u0(4);
      for (std::size_t m = 0; m < 4; ++m) u0[m] = 1.0 / static_cast<double>(m + 1);
      const auto h = sse::run_parareal(u0, path, c, g, pc);
      const double e0 = h.sup_error(0);
      for (int k = 1; k <= 3; ++k) {
        const double bound = sse::linear_error_bound(theta, lam, alpha, g.coarse_step(), k, g.N) * e0;
        ok = ok && h.sup_error(k) <= bound;
        if (bound > 0) tightest = std::max(tightest, h.sup_error(k) / bound);
        ++checked;
      }
    }
  }
  return {ok, fmt("%d (path, k) pairs, largest error/bound ratio %.3g", checked, tightest)};
}

// 9. Analytic identities.
Outcome identities() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double tau_gap = 0.0, eta_gap = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double th = U(rng), lam = 20 * U(rng) - 10, a = 3 * U(rng), dT = U(rng);
    const Complex e = Complex(1.0, (1 - th) * lam * dT) / Complex(1.0, -th * lam * dT);
    const double want = std::norm(e) * std::exp(-2 * a * dT);
    tau_gap = std::max(tau_gap, std::abs(sse::stable_function(th, lam, a, dT) - want) / std::max(1.0, want));
    eta_gap = std::max(eta_gap, std::abs(std::abs(sse::eta(0.5, lam, dT)) - 1.0));
  }
  bool decreasing = true;
  for (double L : {0.1, 1.0, 5.0})
    for (double dT : {0.01, 0.1, 0.5})
      for (int i = 0; i < 100; ++i)
        decreasing = decreasing && sse::nonlinear_factor((i + 1) / 100.0, L, 1.0, dT).f <
                                       sse::nonlinear_factor(i / 100.0, L, 1.0, dT).f;
  const double x = sse::delta_t_star(1.0);
  const bool ok = tau_gap <= 1e-14 && eta_gap <= 1e-15 && decreasing && std::abs(x - 0.567143) <= 1e-6;
  return {ok, fmt("tau gap %.2g, ||eta|-1| at theta=1/2 %.2g, f decreasing %s, dT*(1)=%.9f", tau_gap, eta_gap,
                  decreasing ? "yes" : "no", x)};
}

// 10. Byte-identical CSV at 1 and 8 threads.
Outcome determinism() {
  std::vector<sse::ExperimentConfig> cs;
  {
    auto c = linear_experiment(0.5, std::sqrt(2.0), 1.0, 6);
    c.grid = {1.0, 8, 4};
    c.paths = 300;
    c.k_max = 4;
    cs.push_back(c);
    c.study.kind = sse::StudyKind::OrderStudy;
    c.study.dT_list = {0.25, 0.125, 0.0625};
    c.study.k = 1;  // k < N at every dT, so no point is exact
    cs.push_back(c);
    c.study.kind = sse::StudyKind::Invariant;
    c.grid = {1.0, 16, 1};
    c.study.burn_in = 2.0;
    cs.push_back(c);
    c.study.kind = sse::StudyKind::MomentsCheck;
    c.model.u0_sd = 0.3;
    cs.push_back(c);
    c.study.kind = sse::StudyKind::Region;
    cs.push_back(c);
    auto nl = linear_experiment(0.7, 0.0, 0.5, 4);
    nl.model.nonlinearity = sse::NonlinearityKind::SaturatedCubic;
    nl.model.lambda = 1.0;
    nl.grid = {1.0, 8, 2};
    nl.paths = 100;
    cs.push_back(nl);
  }
  int same = 0;
  for (auto c : cs) {
    c.threads = 1;
    const auto a = sse::run_study(c).csv;
    c.threads = 8;
    const auto b = sse::run_study(c).csv;
    same += a == b && !a.empty();
  }
  return {same == static_cast<int>(cs.size()), fmt("%d of %zu studies byte-identical", same, cs.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"finite termination", finite_termination},
      {"oracle equivalence", oracle_equivalence},
      {"order reproduction", order_reproduction},
      {"iteration count", iteration_count},
      {"divergence regime", divergence_regime},
      {"invariant measure", invariant_measure},
      {"moment oracle", moment_oracle},
      {"per-path bound", per_path_bound},
      {"analytic identities", identities},
      {"determinism", determinism},
  };
  int failed = 0, i = 0;
  for (const auto& [name, fn] : criteria) {
    ++i;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-20s %s  (%.1f s) %s\n", i, name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed;
}
