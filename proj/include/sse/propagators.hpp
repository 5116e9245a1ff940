#pragma once

#include <sse/noise.hpp>
#include <sse/spectral.hpp>
#include <sse/types.hpp>

#include <memory>
#include <optional>
#include <span>

namespace sse {

enum class FineKind { ExpEuler, ExactLinear };

/// How the coarse theta-scheme takes its noise in the linear case: the
/// plain increment S_theta S(dT) Q^{1/2} delta_n W, or S_theta times the exact
/// stochastic convolution over the coarse interval.
enum class CoarseNoise { Increment, ExactConvolution };

struct CoarseOptions {
  CoarseNoise noise = CoarseNoise::Increment;
  double tol = 1e-12;  ///< fixed-point tolerance for the implicit nonlinear solve
  int max_iterations = 200;
  /// Use the fixed-point solve even when a Linear model has a closed form.
  bool solve_linear_implicitly = false;
};

/// Advances a state across one coarse interval [T_n, T_{n+1}] on a fixed
/// (model, grid) pair. Implementations only read noise of interval n.
class Propagator {
public:
  virtual ~Propagator() = default;
  virtual SpectralField advance(const SpectralField& u, int n, const NoisePath& path) const = 0;
  /// True when the map samples the exact transition law of the truncated model.
  virtual bool distributionally_exact() const = 0;
};

/// Exponential theta-scheme on the coarse grid. Linear models use the
/// closed form eta e^{-lambda_m dT} u + S_theta e^{-lambda_m dT} q dW; other
/// nonlinearities solve the implicit relation by fixed-point iteration.
class ExpThetaCoarse final : public Propagator {
public:
  /// Throws ContractionViolation when theta * dT * L_F >= 1 for a nonlinear model.
  ExpThetaCoarse(const ModelConfig& cfg, const TimeGrid& grid, CoarseOptions opts = {});

  SpectralField advance(const SpectralField& u, int n, const NoisePath& path) const override;
  bool distributionally_exact() const override { return false; }

  /// Same step with an explicit coarse increment (length M) instead of the path.
  SpectralField step_with_increment(const SpectralField& u, std::span<const Complex> dW) const;

private:
  SpectralField linear_step(const SpectralField& u, std::span<const Complex> dW) const;
  SpectralField convolution_step(const SpectralField& u, int n, const NoisePath& path) const;
  SpectralField implicit_step(const SpectralField& u, std::span<const Complex> dW) const;

  ModelConfig cfg_;
  TimeGrid grid_;
  CoarseOptions opts_;
  NonlinearTerm F_;
  std::vector<Complex> semigroup_;  // e^{-lambda_m dT}
  std::vector<Complex> gain_;       // eta e^{-lambda_m dT}
  std::vector<Complex> noise_gain_; // S_theta e^{-lambda_m dT} q_m
  Complex s_theta_{1.0};
  std::optional<OuIncrementSampler> conv_;  // ExactConvolution only
  std::vector<Complex> fine_semigroup_;       // e^{-lambda_m dt}
};

/// Exponential Euler u+ = S(h)(u + i h F(u) + Q^{1/2} dW) on the fine grid.
class ExpEulerFine final : public Propagator {
public:
  ExpEulerFine(const ModelConfig& cfg, const TimeGrid& grid);

  SpectralField advance(const SpectralField& u, int n, const NoisePath& path) const override;
  bool distributionally_exact() const override { return false; }
  SpectralField step(const SpectralField& u, int n, int j, const NoisePath& path) const;

private:
  ModelConfig cfg_;
  TimeGrid grid_;
  NonlinearTerm F_;
  std::vector<Complex> semigroup_;
};

/// Exact OU transition for Linear models, composed over the J fine steps and
/// driven by the same plain increments as the coarse propagator.
class ExactLinearFine final : public Propagator {
public:
  ExactLinearFine(const ModelConfig& cfg, const TimeGrid& grid);

  SpectralField advance(const SpectralField& u, int n, const NoisePath& path) const override;
  bool distributionally_exact() const override { return true; }
  SpectralField step(const SpectralField& u, int n, int j, const NoisePath& path) const;

private:
  ModelConfig cfg_;
  TimeGrid grid_;
  OuIncrementSampler sampler_;
};

std::unique_ptr<Propagator> make_fine_propagator(FineKind kind, const ModelConfig& cfg, const TimeGrid& grid);

enum class StepSize { Coarse, Fine };

// One-shot forms of the steps above. Each builds its tables on every call;
// use the classes for repeated stepping.

SpectralField exp_theta_linear_step(const SpectralField& u, int n, const NoisePath& path, const ModelConfig& cfg,
                                    const TimeGrid& grid);
/// Coarse: step dT with delta_n W (j ignored). Fine: step dt with delta_{n,j} W.
SpectralField exp_euler_step(const SpectralField& u, int n, int j, const NoisePath& path, const ModelConfig& cfg,
                             const TimeGrid& grid, StepSize size);
SpectralField exp_theta_nonlinear_step(const SpectralField& u, int n, const NoisePath& path, const ModelConfig& cfg,
                                       const TimeGrid& grid, double tol = 1e-12, int max_iterations = 200);
SpectralField exact_linear_fine_step(const SpectralField& u, int n, int j, const NoisePath& path,
                                     const ModelConfig& cfg, const TimeGrid& grid);
SpectralField propagate_fine(const SpectralField& u, int n, const NoisePath& path, const ModelConfig& cfg,
                             const TimeGrid& grid, FineKind kind);

}  // namespace sse
