#include <sse/analysis.hpp>

#include <sse/noise.hpp>
#include <sse/spectral.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sse {

Complex s_theta(double theta, double lambda, double dT) { return 1.0 / Complex(1.0, -theta * lambda * dT); }

Complex eta(double theta, double lambda, double dT) {
  return Complex(1.0, (1.0 - theta) * lambda * dT) / Complex(1.0, -theta * lambda * dT);
}

double stable_function(double theta, double lambda, double alpha, double dT) {
  const double x2 = lambda * lambda * dT * dT;
  return (1.0 + (1.0 - theta) * (1.0 - theta) * x2) / ((1.0 + theta * theta * x2) * std::exp(2.0 * alpha * dT));
}

ContractionCheck uniform_contraction_check(double theta, double lambda, double alpha, double dT) {
  const Complex e = eta(theta, lambda, dT);
  const double damp = std::exp(-alpha * dT);
  ContractionCheck out;
  out.coupling = std::abs(std::exp(Complex(0.0, lambda * dT)) - e) * damp;
  out.beta = std::abs(e) * damp;
  out.converges = out.coupling + out.beta < 1.0;
  out.rate = out.beta < 1.0 ? out.coupling / (1.0 - out.beta) : std::numeric_limits<double>::infinity();
  out.sufficient_alpha = std::sqrt(std::max(0.5 - theta, 0.0)) * std::abs(lambda);
  return out;
}

RegionRaster region_raster(double theta, double dT, double alpha_min, double alpha_max, double lambda_min,
                           double lambda_max, int nx, int ny) {
  if (!(alpha_max > alpha_min) || !(lambda_max > lambda_min) || nx < 1 || ny < 1)
    throw std::invalid_argument("region_raster: empty alpha/lambda range or resolution");
  RegionRaster r;
  r.alphas.resize(static_cast<std::size_t>(nx));
  r.lambdas.resize(static_cast<std::size_t>(ny));
  for (int i = 0; i < nx; ++i) r.alphas[i] = alpha_min + (i + 0.5) * (alpha_max - alpha_min) / nx;
  for (int j = 0; j < ny; ++j) r.lambdas[j] = lambda_min + (j + 0.5) * (lambda_max - lambda_min) / ny;
  r.stable_value.resize(static_cast<std::size_t>(nx) * ny);
  r.stable.resize(r.stable_value.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double tau = stable_function(theta, r.lambdas[j], r.alphas[i], dT);
      r.stable_value[static_cast<std::size_t>(j) * nx + i] = tau;
      r.stable[static_cast<std::size_t>(j) * nx + i] = tau < 1.0;
    }
  return r;
}

std::vector<GaussianStats> exact_moments(double t, const std::vector<GaussianStats>& initial, const ModelConfig& cfg) {
  const double lambda = cfg.linear_lambda();
  if (initial.size() != cfg.modes) throw std::invalid_argument("exact_moments: one initial law per mode expected");
  if (!(t >= 0.0)) throw std::invalid_argument("exact_moments: t must be >= 0");
  const double alpha = cfg.alpha;
  if (std::isinf(t)) {
    if (alpha <= 0.0) throw std::domain_error("exact_moments: no limit law for alpha = 0 as t -> inf");
    return invariant_stats(cfg);
  }
  // (1 - e^{-2 alpha t}) / alpha, with the alpha -> 0 limit 2t.
  const double noise_var = alpha > 0.0 ? -std::expm1(-2.0 * alpha * t) / alpha : 2.0 * t;
  std::vector<GaussianStats> out(cfg.modes);
  for (std::size_t m = 0; m < cfg.modes; ++m) {
    const Complex drift = -eigenvalue(static_cast<int>(m + 1), alpha) + Complex(0.0, lambda);
    const Complex g = std::exp(drift * t);
    out[m].mean = g * initial[m].mean;
    out[m].covariance = std::exp(-2.0 * alpha * t) * initial[m].covariance + noise_var * cfg.q[m] * cfg.q[m];
    out[m].relation = std::exp(2.0 * drift * t) * initial[m].relation;
  }
  return out;
}

double geometric_sum(double r, int n) {
  if (n <= 0) return 0.0;
  if (r == 1.0) return static_cast<double>(n);
  if (r <= 0.0) return (1.0 - std::pow(r, n)) / (1.0 - r);
  const double lr = std::log(r);
  return std::expm1(n * lr) / std::expm1(lr);
}

std::vector<GaussianStats> theta_scheme_moments(int n, const std::vector<GaussianStats>& initial,
                                                const ModelConfig& cfg, double dT) {
  const double lambda = cfg.linear_lambda();
  if (initial.size() != cfg.modes) throw std::invalid_argument("theta_scheme_moments: one initial law per mode expected");
  if (n < 0) throw std::invalid_argument("theta_scheme_moments: n must be >= 0");
  const Complex e = eta(cfg.theta, lambda, dT);
  const double tau = stable_function(cfg.theta, lambda, cfg.alpha, dT);
  const double x2 = lambda * lambda * dT * dT;
  const double noise_scale =
      geometric_sum(tau, n) * 2.0 * dT / ((1.0 + cfg.theta * cfg.theta * x2) * std::exp(2.0 * cfg.alpha * dT));
  const Complex eta_n = std::pow(e, n);
  std::vector<GaussianStats> out(cfg.modes);
  for (std::size_t m = 0; m < cfg.modes; ++m) {
    const Complex sg = std::exp(-eigenvalue(static_cast<int>(m + 1), cfg.alpha) * (dT * n));
    out[m].mean = eta_n * sg * initial[m].mean;
    out[m].covariance = std::pow(tau, n) * initial[m].covariance + noise_scale * cfg.q[m] * cfg.q[m];
    out[m].relation = eta_n * eta_n * sg * sg * initial[m].relation;
  }
  return out;
}

Complex char_function(const GaussianStats& nu, Complex c) {
  const Complex cb = std::conj(c);
  const double phase = (cb * nu.mean).real();
  const double quad = nu.covariance * std::norm(c) + (cb * nu.relation * cb).real();
  return std::exp(Complex(-0.25 * quad, phase));
}

std::vector<GaussianStats> invariant_stats(const ModelConfig& cfg) {
  if (!(cfg.alpha > 0.0)) throw std::invalid_argument("invariant measure requires alpha > 0");
  std::vector<GaussianStats> out(cfg.modes);
  for (std::size_t m = 0; m < cfg.modes; ++m) out[m].covariance = cfg.q[m] * cfg.q[m] / cfg.alpha;
  return out;
}

SpectralField sample_invariant(const ModelConfig& cfg, std::uint64_t seed) {
  if (!(cfg.alpha > 0.0)) throw std::invalid_argument("sample_invariant requires alpha > 0");
  SpectralField u(cfg.modes);
  const double scale = 1.0 / std::sqrt(2.0 * cfg.alpha);
  for (std::size_t m = 0; m < cfg.modes; ++m)
    u[m] = (cfg.q[m] * scale) * standard_complex_normal(seed, 0, 0, static_cast<std::uint32_t>(m), Stream::Invariant);
  return u;
}

NonlinearFactor nonlinear_factor(double theta, double lipschitz, double alpha, double dT) {
  if (lipschitz < 0.0) throw std::invalid_argument("nonlinear_factor: L_F must be >= 0");
  const double ld = lipschitz * dT;
  const double f = (1.0 + (2.0 - theta) * ld + ld * std::exp(ld)) * std::exp(-alpha * dT);
  return {f, f < 1.0};
}

double binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return std::round(c);
}

double mk_norm_bound(double beta, int n, int k) {
  if (n < 1 || k < 0) throw std::invalid_argument("mk_norm_bound: need n >= 1 and k >= 0");
  if (beta < 0.0) throw std::invalid_argument("mk_norm_bound: beta must be >= 0");
  if (k == 0) return 1.0;
  const double c = binomial(n - 1, k);
  if (c == 0.0) return 0.0;
  if (beta < 1.0) {
    const double row = (1.0 - std::pow(beta, n - 1)) / (1.0 - beta);
    return std::min(std::pow(row, k), c);
  }
  return std::pow(beta, n - 1 - k) * c;
}

double linear_error_bound(double theta, double lambda, double alpha, double dT, int k, int n) {
  const auto chk = uniform_contraction_check(theta, lambda, alpha, dT);
  return std::pow(chk.coupling, k) * mk_norm_bound(chk.beta, n, k);
}

double delta_t_star(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("delta_t_star requires alpha > 0");
  // x^{-1} ln x^{-1} decreases from +inf to 0 on (0, 1).
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (-std::log(mid) / mid > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sse
