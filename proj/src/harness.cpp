#include <sse/harness.hpp>

#include <sse/errors.hpp>
#include <sse/noise.hpp>
#include <sse/parallel.hpp>
#include <sse/parareal.hpp>
#include <sse/propagators.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> xs) { return pairwise_sum(xs) / static_cast<double>(xs.size()); }

/// Standard error of the mean of xs.
double se_of(std::span<const double> xs, double mean) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = (xs[i] - mean) * (xs[i] - mean);
  return std::sqrt(pairwise_sum(dev) / static_cast<double>(n - 1) / static_cast<double>(n));
}

int steps_in(double span, double step, const char* what) {
  const double r = std::round(span / step);
  if (r < 1.0 || std::abs(span / step - r) > 1e-9 * r)
    throw ConfigError(std::string(what) + " is not an integer multiple of the step");
  return static_cast<int>(r);
}

}  // namespace

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

SpectralField initial_value(const ModelSpec& spec, std::uint64_t seed) {
  SpectralField u(spec.modes);
  for (std::size_t m = 0; m < spec.modes; ++m) {
    u[m] = spec.u0_scale / static_cast<double>(m + 1);
    if (spec.u0_sd != 0.0)
      u[m] += spec.u0_sd * standard_complex_normal(seed, 0, 0, static_cast<std::uint32_t>(m), Stream::InitialValue).real();
  }
  return u;
}

std::vector<GaussianStats> initial_law(const ModelSpec& spec) {
  std::vector<GaussianStats> law(spec.modes);
  const double v = spec.u0_sd * spec.u0_sd;
  for (std::size_t m = 0; m < spec.modes; ++m) law[m] = {spec.u0_scale / static_cast<double>(m + 1), v, v};
  return law;
}

ErrorTable mc_error_vs_k(const ExperimentConfig& cfg) {
  const ModelConfig model = cfg.model.build();
  const TimeGrid& grid = cfg.grid;
  const PararealConfig pcfg = cfg.parareal();
  const ExpThetaCoarse coarse(model, grid, pcfg.coarse);
  const auto fine = make_fine_propagator(pcfg.fine_kind, model, grid);

  const std::size_t P = static_cast<std::size_t>(cfg.paths);
  const std::size_t K = static_cast<std::size_t>(cfg.k_max) + 1;
  const std::size_t N = static_cast<std::size_t>(grid.N) + 1;
  // sq[(k * N + n) * P + p] = eps_n^(k)(path p)^2, laid out for summation over p.
  std::vector<double> sq(K * N * P, kInf);
  std::vector<double> sup_sq(K * P, kInf);

  parallel_for(P, cfg.threads, [&](std::size_t p) {
    const std::uint64_t seed = derive_seed(cfg.seed, p);
    const NoisePath path = NoisePath::sample(grid, model.modes, seed);
    const PararealHistory h = run_parareal(initial_value(cfg.model, seed), coarse, *fine, path, grid, pcfg);
    for (std::size_t k = 0; k < h.errors.size(); ++k) {
      double s = 0.0;
      for (std::size_t n = 0; n < N; ++n) {
        const double e2 = h.errors[k][n] * h.errors[k][n];
        sq[(k * N + n) * P + p] = e2;
        s = std::max(s, e2);
      }
      sup_sq[k * P + p] = s;
    }
  });

  ErrorTable t;
  for (std::size_t k = 0; k < K; ++k) {
    ErrorRow row;
    row.k = static_cast<int>(k);
    double best = -1.0;
    std::size_t best_n = 1;
    for (std::size_t n = 1; n < N; ++n) {
      const double mu = mean_of(std::span<const double>(sq).subspan((k * N + n) * P, P));
      if (mu > best || std::isnan(mu)) {
        best = std::isnan(mu) ? kInf : mu;
        best_n = n;
      }
      if (std::isinf(best)) break;
    }
    if (N == 1) best = 0.0;
    row.e_k = std::sqrt(best);
    row.mean_sup = std::sqrt(mean_of(std::span<const double>(sup_sq).subspan(k * P, P)));
    if (!std::isfinite(row.e_k)) {
      row.e_k = kInf;
      row.se = kInf;
      t.diverged = true;
    } else if (row.e_k > 0.0) {
      const auto col = std::span<const double>(sq).subspan((k * N + best_n) * P, P);
      row.se = se_of(col, best) / (2.0 * row.e_k);
    }
    t.rows.push_back(row);
  }
  return t;
}

OrderResult order_study(const ExperimentConfig& cfg) {
  const double dt = cfg.grid.fine_step();
  OrderResult r;
  std::vector<double> xs, ys;
  for (double dT : cfg.study.dT_list) {
    ExperimentConfig c = cfg;
    c.grid.N = steps_in(cfg.grid.T, dT, "grid.T");
    c.grid.J = steps_in(dT, dt, "study.dT_list entry");
    c.k_max = cfg.study.k;
    const ErrorTable t = mc_error_vs_k(c);
    const ErrorRow& row = t.rows.back();
    r.rows.push_back({dT, row.e_k, row.se});
    r.diverged = r.diverged || t.diverged;
    if (std::isfinite(row.e_k) && row.e_k > 0.0) {
      xs.push_back(std::log2(dT));
      ys.push_back(std::log2(row.e_k));
    }
  }
  if (xs.size() < 3) throw Divergence("order study: fewer than 3 usable (finite, positive) error values");
  const double n = static_cast<double>(xs.size());
  const double mx = pairwise_sum(xs) / n, my = pairwise_sum(ys) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  return r;
}

SampleMoments sample_moments(std::span<const Complex> xs) {
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("sample_moments: need at least two samples");
  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = xs[i].real();
    im[i] = xs[i].imag();
  }
  SampleMoments s;
  const double mr = mean_of(re), mi = mean_of(im);
  s.mean = {mr, mi};
  s.se_mean_re = se_of(re, mr);
  s.se_mean_im = se_of(im, mi);
  std::vector<double> c(n), rr(n), ri(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex d = xs[i] - s.mean;
    c[i] = std::norm(d);
    rr[i] = (d * d).real();
    ri[i] = (d * d).imag();
  }
  // n/(n-1) removes the bias from estimating the mean.
  const double corr = static_cast<double>(n) / static_cast<double>(n - 1);
  const double mc = mean_of(c), mrr = mean_of(rr), mri = mean_of(ri);
  s.covariance = corr * mc;
  s.relation = corr * Complex(mrr, mri);
  s.se_cov = corr * se_of(c, mc);
  s.se_rel_re = corr * se_of(rr, mrr);
  s.se_rel_im = corr * se_of(ri, mri);
  return s;
}

namespace {

/// Endpoints of `steps` coarse theta-steps of size dT per path.
std::vector<std::vector<Complex>> coarse_ensemble(const ExperimentConfig& cfg, const TimeGrid& grid) {
  const ModelConfig model = cfg.model.build();
  const ExpThetaCoarse coarse(model, grid, {.noise = cfg.coarse_noise});
  const std::size_t P = static_cast<std::size_t>(cfg.paths);
  std::vector<SpectralField> ends(P);
  parallel_for(P, cfg.threads, [&](std::size_t p) {
    const std::uint64_t seed = derive_seed(cfg.seed, p);
    const NoisePath path = NoisePath::sample(grid, model.modes, seed);
    SpectralField u = initial_value(cfg.model, seed);
    for (int n = 0; n < grid.N; ++n) u = coarse.advance(u, n, path);
    ends[p] = std::move(u);
  });
  std::vector<std::vector<Complex>> by_mode(model.modes, std::vector<Complex>(P));
  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t m = 0; m < model.modes; ++m) by_mode[m][p] = ends[p][m];
  return by_mode;
}

}  // namespace

std::vector<InvariantRow> invariant_study(const ExperimentConfig& cfg) {
  const ModelConfig model = cfg.model.build();
  if (!(model.alpha > 0.0)) throw ConfigError("invariant study requires model.alpha > 0");
  const double dT = cfg.grid.coarse_step();
  const int steps = steps_in(cfg.study.burn_in, dT, "study.burn_in");
  const TimeGrid grid{steps * dT, steps, 1};
  const auto samples = coarse_ensemble(cfg, grid);
  const auto target = invariant_stats(model);
  std::vector<GaussianStats> scheme;
  if (model.is_linear()) scheme = theta_scheme_moments(steps, initial_law(cfg.model), model, dT);
  std::vector<InvariantRow> rows;
  for (std::size_t m = 0; m < model.modes; ++m) {
    InvariantRow row;
    row.m = static_cast<int>(m + 1);
    row.sample = sample_moments(samples[m]);
    row.cov_target = target[m].covariance;
    row.cov_scheme = scheme.empty() ? std::numeric_limits<double>::quiet_NaN() : scheme[m].covariance;
    rows.push_back(row);
  }
  return rows;
}

std::vector<MomentRow> moments_check(const ExperimentConfig& cfg) {
  const ModelConfig model = cfg.model.build();
  if (!model.is_linear()) throw ConfigError("moments check requires a linear model");
  if (cfg.study.n < 1) throw ConfigError("'study.n' must be >= 1");
  if (cfg.coarse_noise != CoarseNoise::Increment)
    throw ConfigError("moments check compares the plain-increment coarse scheme; set coarse_noise = increment");
  const double dT = cfg.grid.coarse_step();
  const TimeGrid grid{cfg.study.n * dT, cfg.study.n, cfg.grid.J};
  const auto samples = coarse_ensemble(cfg, grid);
  const auto closed = theta_scheme_moments(cfg.study.n, initial_law(cfg.model), model, dT);
  std::vector<MomentRow> rows;
  for (std::size_t m = 0; m < model.modes; ++m) {
    const SampleMoments s = sample_moments(samples[m]);
    const int mm = static_cast<int>(m + 1);
    rows.push_back({mm, "mean_re", s.mean.real(), closed[m].mean.real(), s.se_mean_re});
    rows.push_back({mm, "mean_im", s.mean.imag(), closed[m].mean.imag(), s.se_mean_im});
    rows.push_back({mm, "cov", s.covariance, closed[m].covariance, s.se_cov});
    rows.push_back({mm, "rel_re", s.relation.real(), closed[m].relation.real(), s.se_rel_re});
    rows.push_back({mm, "rel_im", s.relation.imag(), closed[m].relation.imag(), s.se_rel_im});
  }
  return rows;
}

RegionRaster region_cmd(const ExperimentConfig& cfg) {
  const auto& s = cfg.study;
  return region_raster(cfg.model.theta, cfg.grid.coarse_step(), s.alpha_min, s.alpha_max, s.lambda_min, s.lambda_max,
                       s.nx, s.ny);
}

std::string to_csv(const ErrorTable& t) {
  std::string out = "k,e_k,stderr\n";
  for (const auto& r : t.rows) out += std::to_string(r.k) + "," + format_double(r.e_k) + "," + format_double(r.se) + "\n";
  return out;
}

std::string to_csv(const OrderResult& r) {
  std::string out = "dT,e_k,stderr\n";
  for (const auto& row : r.rows)
    out += format_double(row.dT) + "," + format_double(row.e_k) + "," + format_double(row.se) + "\n";
  out += "# slope=" + format_double(r.slope) + " intercept=" + format_double(r.intercept) + "\n";
  return out;
}

std::string to_csv(const std::vector<InvariantRow>& rows) {
  std::string out = "m,mean_re,mean_im,cov,cov_target,rel_re,rel_im,se\n";
  for (const auto& r : rows) {
    const auto& s = r.sample;
    out += std::to_string(r.m) + "," + format_double(s.mean.real()) + "," + format_double(s.mean.imag()) + "," +
           format_double(s.covariance) + "," + format_double(r.cov_target) + "," + format_double(s.relation.real()) +
           "," + format_double(s.relation.imag()) + "," + format_double(s.se_cov) + "\n";
  }
  return out;
}

std::string to_csv(const std::vector<MomentRow>& rows) {
  std::string out = "m,stat,empirical,closed_form,se\n";
  for (const auto& r : rows)
    out += std::to_string(r.m) + "," + r.stat + "," + format_double(r.empirical) + "," + format_double(r.closed_form) +
           "," + format_double(r.se) + "\n";
  return out;
}

std::string to_csv(const RegionRaster& r) {
  std::string out = "alpha,lambda,stable\n";
  const std::size_t nx = r.alphas.size();
  for (std::size_t j = 0; j < r.lambdas.size(); ++j)
    for (std::size_t i = 0; i < nx; ++i)
      out += format_double(r.alphas[i]) + "," + format_double(r.lambdas[j]) + "," + (r.stable[j * nx + i] ? "1" : "0") +
             "\n";
  return out;
}

StudyOutput run_study(const ExperimentConfig& cfg) {
  switch (cfg.study.kind) {
    case StudyKind::ErrorVsK: {
      const auto t = mc_error_vs_k(cfg);
      return {to_csv(t), t.diverged};
    }
    case StudyKind::OrderStudy: {
      const auto r = order_study(cfg);
      return {to_csv(r), r.diverged};
    }
    case StudyKind::Invariant:
      return {to_csv(invariant_study(cfg)), false};
    case StudyKind::Region:
      return {to_csv(region_cmd(cfg)), false};
    case StudyKind::MomentsCheck:
      return {to_csv(moments_check(cfg)), false};
  }
  throw std::logic_error("run_study: unknown study kind");
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace sse
