#pragma once

#include <sse/analysis.hpp>
#include <sse/config.hpp>

#include <span>
#include <string>
#include <vector>

namespace sse {

/// Pairwise (cascade) sum in index order; the result depends only on the
/// input sequence, never on how it was produced.
double pairwise_sum(std::span<const double> xs);

/// Initial value of sample `seed`: u0^m = u0_scale / m + u0_sd * xi_m.
SpectralField initial_value(const ModelSpec& spec, std::uint64_t seed);
/// Law of initial_value: mean u0_scale / m, covariance = relation = u0_sd^2.
std::vector<GaussianStats> initial_law(const ModelSpec& spec);

struct ErrorRow {
  int k = 0;
  double e_k = 0.0;  ///< (sup_n mean_p ||u_n^(k) - v_n||^2)^{1/2}
  double se = 0.0;   ///< delta-method standard error of e_k
  double mean_sup = 0.0;  ///< diagnostic (mean_p sup_n ||.||^2)^{1/2}
};
struct ErrorTable {
  std::vector<ErrorRow> rows;
  bool diverged = false;  ///< some path overflowed; affected rows are +inf
};
ErrorTable mc_error_vs_k(const ExperimentConfig& cfg);

struct OrderRow {
  double dT = 0.0;
  double e_k = 0.0;
  double se = 0.0;
};
struct OrderResult {
  std::vector<OrderRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  bool diverged = false;
};
/// e_k at k = study.k for each dT in study.dT_list, with the fine step of
/// cfg.grid held fixed; least-squares fit of log2 e_k against log2 dT.
OrderResult order_study(const ExperimentConfig& cfg);

/// Moments of a complex sample: mean, covariance E|Z - m|^2 and relation
/// E(Z - m)^2, each with its Monte Carlo standard error.
struct SampleMoments {
  Complex mean{};
  double covariance = 0.0;
  Complex relation{};
  double se_mean_re = 0.0, se_mean_im = 0.0;
  double se_cov = 0.0;
  double se_rel_re = 0.0, se_rel_im = 0.0;
};
SampleMoments sample_moments(std::span<const Complex> xs);

struct InvariantRow {
  int m = 1;
  SampleMoments sample;
  double cov_target = 0.0;  ///< q_m^2 / alpha
  double cov_scheme = 0.0;  ///< closed-form theta-scheme covariance at the sampled step (NaN if nonlinear)
};
/// Coarse theta-scheme ensemble (J = 1, step grid.dT) run to study.burn_in;
/// one endpoint per path.
std::vector<InvariantRow> invariant_study(const ExperimentConfig& cfg);

struct MomentRow {
  int m = 1;
  std::string stat;  ///< mean_re, mean_im, cov, rel_re, rel_im
  double empirical = 0.0;
  double closed_form = 0.0;
  double se = 0.0;
};
/// Ensemble of study.n coarse theta-steps against theta_scheme_moments.
std::vector<MomentRow> moments_check(const ExperimentConfig& cfg);

/// region_raster at model.theta and the coarse step of cfg.grid.
RegionRaster region_cmd(const ExperimentConfig& cfg);

std::string to_csv(const ErrorTable& t);
std::string to_csv(const OrderResult& r);
std::string to_csv(const std::vector<InvariantRow>& rows);
std::string to_csv(const std::vector<MomentRow>& rows);
std::string to_csv(const RegionRaster& r);

struct StudyOutput {
  std::string csv;
  bool diverged = false;
};
/// Runs cfg.study.kind and renders its CSV.
StudyOutput run_study(const ExperimentConfig& cfg);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace sse
