#include <sse/propagators.hpp>

#include <sse/analysis.hpp>
#include <sse/errors.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sse {

namespace {

/// S(h) (u + i h F(u) + q dW), the explicit part shared by exponential Euler
/// and the theta-scheme (with weight (1 - theta) dT).
SpectralField explicit_exponential(const SpectralField& u, const SpectralField& Fu, double weight,
                                   std::span<const Complex> dW, const QSpec& q, const std::vector<Complex>& S) {
  const Complex iw(0.0, weight);
  SpectralField out(u.size());
  for (std::size_t m = 0; m < u.size(); ++m) out[m] = S[m] * (u[m] + iw * Fu[m] + q[m] * dW[m]);
  return out;
}

void require_linear(const ModelConfig& cfg, const char* what) {
  if (!cfg.is_linear()) throw std::invalid_argument(std::string(what) + " requires a Linear nonlinearity");
}

}  // namespace

ExpThetaCoarse::ExpThetaCoarse(const ModelConfig& cfg, const TimeGrid& grid, CoarseOptions opts)
    : cfg_(cfg), grid_(grid), opts_(opts), F_(cfg) {
  cfg_.validate();
  grid_.validate();
  const double dT = grid_.coarse_step();
  semigroup_ = semigroup_factors(cfg_.modes, cfg_.alpha, dT);
  const bool closed_form = cfg_.is_linear() && !opts_.solve_linear_implicitly;
  if (closed_form) {
    const double lambda = cfg_.linear_lambda();
    const Complex e = eta(cfg_.theta, lambda, dT);
    s_theta_ = s_theta(cfg_.theta, lambda, dT);
    gain_.resize(cfg_.modes);
    noise_gain_.resize(cfg_.modes);
    for (std::size_t m = 0; m < cfg_.modes; ++m) {
      gain_[m] = e * semigroup_[m];
      noise_gain_[m] = s_theta_ * semigroup_[m] * cfg_.q[m];
    }
    if (opts_.noise == CoarseNoise::ExactConvolution) {
      conv_.emplace(cfg_, grid_.fine_step(), 0.0, Stream::CoarseConvolution);
      fine_semigroup_ = semigroup_factors(cfg_.modes, cfg_.alpha, grid_.fine_step());
    }
  } else {
    if (opts_.noise == CoarseNoise::ExactConvolution)
      throw std::invalid_argument("exact-convolution coarse noise requires a Linear model");
    const double factor = cfg_.theta * dT * F_.lipschitz();
    if (cfg_.theta > 0.0 && factor >= 1.0) {
      std::ostringstream msg;
      msg << "implicit theta-step is not a contraction: theta*dT*L_F = " << factor << " >= 1";
      throw ContractionViolation(msg.str());
    }
  }
}

SpectralField ExpThetaCoarse::advance(const SpectralField& u, int n, const NoisePath& path) const {
  if (conv_) return convolution_step(u, n, path);
  const auto dW = path.coarse_increments(n);
  return step_with_increment(u, dW);
}

SpectralField ExpThetaCoarse::step_with_increment(const SpectralField& u, std::span<const Complex> dW) const {
  if (dW.size() != cfg_.modes || u.size() != cfg_.modes)
    throw std::invalid_argument("ExpThetaCoarse: state/increment length does not match the model");
  if (!gain_.empty()) return linear_step(u, dW);
  return implicit_step(u, dW);
}

SpectralField ExpThetaCoarse::linear_step(const SpectralField& u, std::span<const Complex> dW) const {
  SpectralField out(u.size());
  for (std::size_t m = 0; m < u.size(); ++m) out[m] = gain_[m] * u[m] + noise_gain_[m] * dW[m];
  return out;
}

SpectralField ExpThetaCoarse::convolution_step(const SpectralField& u, int n, const NoisePath& path) const {
  SpectralField out(u.size());
  for (std::size_t m = 0; m < u.size(); ++m) {
    // sum_j e^{-lambda_m (J-1-j) dt} zeta_j by Horner's rule.
    Complex acc = 0.0;
    for (int j = 0; j < grid_.J; ++j) acc = fine_semigroup_[m] * acc + conv_->sample(path, n, j, m).zeta;
    out[m] = gain_[m] * u[m] + s_theta_ * acc;
  }
  return out;
}

SpectralField ExpThetaCoarse::implicit_step(const SpectralField& u, std::span<const Complex> dW) const {
  const double dT = grid_.coarse_step();
  const SpectralField b = explicit_exponential(u, F_(u), (1.0 - cfg_.theta) * dT, dW, cfg_.q, semigroup_);
  if (cfg_.theta == 0.0) return b;
  const Complex c(0.0, cfg_.theta * dT);
  SpectralField w = b;
  for (int it = 0; it < opts_.max_iterations; ++it) {
    SpectralField next = F_(w);
    for (std::size_t m = 0; m < next.size(); ++m) next[m] = b[m] + c * next[m];
    double diff = 0.0;
    for (std::size_t m = 0; m < next.size(); ++m) diff += std::norm(next[m] - w[m]);
    w = std::move(next);
    if (std::sqrt(diff) <= opts_.tol) return w;
    if (!std::isfinite(diff)) return w;
  }
  throw NonConvergence("implicit theta-step: no convergence after " + std::to_string(opts_.max_iterations) +
                       " fixed-point iterations");
}

ExpEulerFine::ExpEulerFine(const ModelConfig& cfg, const TimeGrid& grid)
    : cfg_(cfg), grid_(grid), F_(cfg), semigroup_(semigroup_factors(cfg.modes, cfg.alpha, grid.fine_step())) {
  cfg_.validate();
  grid_.validate();
}

SpectralField ExpEulerFine::step(const SpectralField& u, int n, int j, const NoisePath& path) const {
  return explicit_exponential(u, F_(u), grid_.fine_step(), path.fine_increments(n, j), cfg_.q, semigroup_);
}

SpectralField ExpEulerFine::advance(const SpectralField& u, int n, const NoisePath& path) const {
  SpectralField v = u;
  for (int j = 0; j < grid_.J; ++j) v = step(v, n, j, path);
  return v;
}

ExactLinearFine::ExactLinearFine(const ModelConfig& cfg, const TimeGrid& grid)
    : cfg_(cfg), grid_(grid), sampler_((require_linear(cfg, "ExactLinearFine"), cfg), grid.fine_step(),
                                       cfg.linear_lambda()) {
  cfg_.validate();
  grid_.validate();
}

SpectralField ExactLinearFine::step(const SpectralField& u, int n, int j, const NoisePath& path) const {
  SpectralField out(u.size());
  for (std::size_t m = 0; m < u.size(); ++m) out[m] = sampler_.decay(m) * u[m] + sampler_.sample(path, n, j, m).zeta;
  return out;
}

SpectralField ExactLinearFine::advance(const SpectralField& u, int n, const NoisePath& path) const {
  SpectralField v = u;
  for (int j = 0; j < grid_.J; ++j) v = step(v, n, j, path);
  return v;
}

std::unique_ptr<Propagator> make_fine_propagator(FineKind kind, const ModelConfig& cfg, const TimeGrid& grid) {
  if (kind == FineKind::ExactLinear) return std::make_unique<ExactLinearFine>(cfg, grid);
  return std::make_unique<ExpEulerFine>(cfg, grid);
}

SpectralField exp_theta_linear_step(const SpectralField& u, int n, const NoisePath& path, const ModelConfig& cfg,
                                    const TimeGrid& grid) {
  require_linear(cfg, "exp_theta_linear_step");
  return ExpThetaCoarse(cfg, grid).advance(u, n, path);
}

SpectralField exp_euler_step(const SpectralField& u, int n, int j, const NoisePath& path, const ModelConfig& cfg,
                             const TimeGrid& grid, StepSize size) {
  if (size == StepSize::Fine) return ExpEulerFine(cfg, grid).step(u, n, j, path);
  const double dT = grid.coarse_step();
  const auto S = semigroup_factors(cfg.modes, cfg.alpha, dT);
  const auto dW = path.coarse_increments(n);
  return explicit_exponential(u, eval_nonlinearity(u, cfg), dT, dW, cfg.q, S);
}

SpectralField exp_theta_nonlinear_step(const SpectralField& u, int n, const NoisePath& path, const ModelConfig& cfg,
                                       const TimeGrid& grid, double tol, int max_iterations) {
  CoarseOptions opts;
  opts.tol = tol;
  opts.max_iterations = max_iterations;
  opts.solve_linear_implicitly = true;
  return ExpThetaCoarse(cfg, grid, opts).advance(u, n, path);
}

SpectralField exact_linear_fine_step(const SpectralField& u, int n, int j, const NoisePath& path,
                                     const ModelConfig& cfg, const TimeGrid& grid) {
  return ExactLinearFine(cfg, grid).step(u, n, j, path);
}

SpectralField propagate_fine(const SpectralField& u, int n, const NoisePath& path, const ModelConfig& cfg,
                             const TimeGrid& grid, FineKind kind) {
  return make_fine_propagator(kind, cfg, grid)->advance(u, n, path);
}

}  // namespace sse
