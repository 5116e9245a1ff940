#pragma once

#include <sse/types.hpp>

#include <vector>

namespace sse {

/// Complex Gaussian law N(mean, covariance, relation):
/// covariance = E|Z - m|^2, relation = E(Z - m)^2.
struct GaussianStats {
  Complex mean{};
  double covariance = 0.0;
  Complex relation{};
  bool operator==(const GaussianStats&) const = default;
};

/// S_theta = (1 - i theta lambda dT)^{-1}.
Complex s_theta(double theta, double lambda, double dT);
/// eta = (1 + i (1 - theta) lambda dT) / (1 - i theta lambda dT).
Complex eta(double theta, double lambda, double dT);

/// Mean-square one-step amplification of the coarse scheme,
/// (1 + (1-theta)^2 lambda^2 dT^2) / ((1 + theta^2 lambda^2 dT^2) e^{2 alpha dT}).
double stable_function(double theta, double lambda, double alpha, double dT);

struct ContractionCheck {
  bool converges = false;      ///< |e^{i lambda dT} - eta| e^{-alpha dT} + |eta| e^{-alpha dT} < 1
  double rate = 0.0;           ///< per-iteration factor, +inf when |eta| e^{-alpha dT} >= 1
  double sufficient_alpha = 0.0;  ///< sqrt((1/2 - theta)^+) |lambda|
  double coupling = 0.0;       ///< |e^{i lambda dT} - eta| e^{-alpha dT}
  double beta = 0.0;           ///< |eta| e^{-alpha dT}
};
ContractionCheck uniform_contraction_check(double theta, double lambda, double alpha, double dT);

/// Row-major raster of the stability region over (alpha, lambda) cell centres.
struct RegionRaster {
  std::vector<double> alphas;   ///< cell centres, size nx
  std::vector<double> lambdas;  ///< cell centres, size ny
  std::vector<double> stable_value;  ///< tau at (alphas[i], lambdas[j]), index j * nx + i
  std::vector<bool> stable;          ///< tau < 1 (tau == 1 counts as unstable)
};
RegionRaster region_raster(double theta, double dT, double alpha_min, double alpha_max, double lambda_min,
                           double lambda_max, int nx, int ny);

/// Law of u^m(t) for the linear model started from per-mode laws `initial`.
/// t may be +inf for alpha > 0; alpha == 0 with t == inf throws std::domain_error.
std::vector<GaussianStats> exact_moments(double t, const std::vector<GaussianStats>& initial, const ModelConfig& cfg);

/// Law of the n-th coarse theta-scheme iterate for the linear model.
std::vector<GaussianStats> theta_scheme_moments(int n, const std::vector<GaussianStats>& initial,
                                                const ModelConfig& cfg, double dT);

/// (1 - r^n) / (1 - r), equal to n at r == 1.
double geometric_sum(double r, int n);

/// E exp(i Re(conj(c) Z)) for Z ~ nu.
Complex char_function(const GaussianStats& nu, Complex c);

/// Invariant law N(0, q_m^2 / alpha, 0) of each mode. Requires alpha > 0.
std::vector<GaussianStats> invariant_stats(const ModelConfig& cfg);

/// One draw u_inf = sum_m q_m / sqrt(2 alpha) (xi_m + i r_m) e_m.
SpectralField sample_invariant(const ModelConfig& cfg, std::uint64_t seed);

struct NonlinearFactor {
  double f = 0.0;
  bool converges = false;
};
/// f(theta) = (1 + (2 - theta) L dT + L dT e^{L dT}) e^{-alpha dT}.
NonlinearFactor nonlinear_factor(double theta, double lipschitz, double alpha, double dT);

/// Binomial coefficient C(n, k) as a double (0 when k > n).
double binomial(int n, int k);

/// Upper bound on ||M^k(beta)||_inf for the n x n strictly lower triangular
/// Toeplitz matrix with subdiagonal entries 1, beta, beta^2, ...
double mk_norm_bound(double beta, int n, int k);

/// Per-path bound on sup_n eps_n^(k) / sup_n eps_n^(0) for the linear model
/// with exact fine propagator: coupling^k * mk_norm_bound(beta, n, k).
double linear_error_bound(double theta, double lambda, double alpha, double dT, int k, int n);

/// Root in (0, 1) of x^{-1} ln(x^{-1}) = alpha, by bisection.
double delta_t_star(double alpha);

}  // namespace sse
