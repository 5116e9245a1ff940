#pragma once

#include <sse/types.hpp>

#include <optional>
#include <vector>

namespace sse {

/// lambda_m = i (m pi)^2 + alpha, for the physical mode number m >= 1.
Complex eigenvalue(int m, double alpha);

/// Per-mode factors e^{-lambda_m t}, m = 1..modes.
std::vector<Complex> semigroup_factors(std::size_t modes, double alpha, double t);

/// S(t) u = e^{-t Lambda} u. Throws std::invalid_argument for t < 0.
SpectralField semigroup_apply(const SpectralField& u, double t, double alpha);
SpectralField semigroup_apply(const SpectralField& u, double t, const ModelConfig& cfg);

double h_norm(const SpectralField& u);
/// sqrt(sum_m |u^m|^2 |lambda_m|^s).
double hs_norm(const SpectralField& u, double s, double alpha);

/// Discrete sine synthesis/analysis pair on P interior points
/// x_p = p / (P + 1). Analysis is exact for fields with at most P modes.
class Collocation {
public:
  Collocation(std::size_t modes, std::size_t points);

  std::size_t modes() const noexcept { return modes_; }
  std::size_t points() const noexcept { return points_; }
  double spacing() const noexcept { return 1.0 / static_cast<double>(points_ + 1); }
  double node(std::size_t p) const noexcept { return static_cast<double>(p + 1) * spacing(); }

  std::vector<Complex> synthesize(const SpectralField& u) const;
  SpectralField analyze(const std::vector<Complex>& grid_values) const;
  /// sum_p conj(a_p) b_p dx.
  Complex inner(const std::vector<Complex>& a, const std::vector<Complex>& b) const;

private:
  std::size_t modes_;
  std::size_t points_;
  std::vector<double> basis_;  // points_ x modes_, row major
};

/// Evaluator for the configured nonlinearity F. Holds the collocation tables
/// so repeated evaluation does not rebuild them.
class NonlinearTerm {
public:
  explicit NonlinearTerm(const ModelConfig& cfg);

  SpectralField operator()(const SpectralField& u) const;
  /// F evaluated pointwise on the collocation grid, before projection.
  /// Only meaningful for collocated kinds.
  std::vector<Complex> pointwise(const std::vector<Complex>& grid_values) const;
  double lipschitz() const noexcept { return lipschitz_; }
  const Collocation* collocation() const noexcept { return colloc_ ? &*colloc_ : nullptr; }

private:
  Nonlinearity kind_;
  std::optional<Collocation> colloc_;
  double lipschitz_ = 0.0;
};

SpectralField eval_nonlinearity(const SpectralField& u, const ModelConfig& cfg);

/// Global Lipschitz constant of F on H: |lambda| for Linear, max|V| for
/// Potential, 2|lambda| for SaturatedCubic (an upper bound, not sharp).
double lipschitz_bound(const ModelConfig& cfg);

/// Collocation points used for cfg: the potential's sample count, or 2M+1.
std::size_t collocation_points(const ModelConfig& cfg);

}  // namespace sse
