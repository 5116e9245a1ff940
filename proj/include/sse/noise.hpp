#pragma once

#include <sse/types.hpp>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace sse {

/// Independent random streams drawn from one seed. Each Gaussian is keyed by
/// (seed, n, j, m, stream), so a value never depends on generation order.
enum class Stream : std::uint32_t {
  Increment = 0,          ///< Brownian increments delta_{n,j} beta_m
  OuResidual = 1,         ///< residual of the exact OU convolution (fine)
  Invariant = 2,          ///< samples of the invariant measure
  CoarseConvolution = 3,  ///< residual of the exact convolution used by the coarse variant
  InitialValue = 4,
  SeedDerivation = 0xFFFFFFFFu,
};

/// Standard complex Gaussian a + ib with a, b ~ N(0, 1) independent.
Complex standard_complex_normal(std::uint64_t seed, std::uint32_t n, std::uint32_t j, std::uint32_t m, Stream s);

/// Seed for Monte Carlo sample `index`, derived from `seed` through the generator.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// All fine-grid complex Brownian increments of one sample path.
/// Indices are zero based: interval n in [0, N), fine step j in [0, J)
/// covering [t_{n,j}, t_{n,j+1}], mode index m in [0, M) for mode m + 1.
class NoisePath {
public:
  NoisePath() = default;
  /// Wraps caller-provided increments (row-major (n, j, m)); used for fixtures
  /// and test overrides.
  NoisePath(int N, int J, std::size_t modes, std::uint64_t seed, std::vector<Complex> increments);

  /// Re and Im of each increment are independent N(0, dt), so E|db|^2 = 2 dt.
  /// The result is identical for every thread count.
  static NoisePath sample(const TimeGrid& grid, std::size_t modes, std::uint64_t seed, unsigned threads = 1);

  int intervals() const noexcept { return N_; }
  int fine_steps() const noexcept { return J_; }
  std::size_t modes() const noexcept { return M_; }
  std::uint64_t seed() const noexcept { return seed_; }

  Complex fine_increment(int n, int j, std::size_t m) const;
  /// The M increments of fine step (n, j).
  std::span<const Complex> fine_increments(int n, int j) const;
  /// delta_n beta_m = sum_j delta_{n,j} beta_m, summed in j order.
  Complex coarse_increment(int n, std::size_t m) const;
  std::vector<Complex> coarse_increments(int n) const;

  std::span<const Complex> raw() const noexcept { return increments_; }

  /// Binary layout: N, J, M, seed as little-endian uint64, then each increment
  /// in row-major (n, j, m) order as two little-endian float64 (re, im).
  void dump(std::ostream& os) const;
  static NoisePath load(std::istream& is);

  bool operator==(const NoisePath&) const = default;

private:
  std::size_t offset(int n, int j) const;

  int N_ = 0;
  int J_ = 0;
  std::size_t M_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<Complex> increments_;
};

inline Complex coarse_increment(const NoisePath& path, int n, std::size_t m) { return path.coarse_increment(n, m); }

/// Mode-wise product q_m dW_m. Throws std::invalid_argument on length mismatch.
SpectralField apply_sqrt_q(const QSpec& q, std::span<const Complex> dW);

/// Plain increment together with the exact stochastic convolution
/// zeta_m = int_{t_j}^{t_{j+1}} e^{-(lambda_m - i lambda)(t_{j+1} - s)} q_m d beta_m(s).
struct OuIncrement {
  Complex dbeta;
  Complex zeta;
};

/// Samples (delta beta_m, zeta_m) jointly: zeta_m = c_m q_m delta beta_m + r_m with
/// c_m = (1 - e^{-kappa dt}) / (kappa dt), kappa = lambda_m - i lambda, and r_m an
/// independent circular Gaussian carrying the remaining variance. The plain
/// increments come from the path; r_m is keyed by (seed, n, j, m, stream).
class OuIncrementSampler {
public:
  OuIncrementSampler(const ModelConfig& cfg, double dt, double lambda, Stream stream = Stream::OuResidual);

  /// e^{-kappa_m dt}
  Complex decay(std::size_t m) const noexcept { return decay_[m]; }
  Complex regression(std::size_t m) const noexcept { return regression_[m]; }
  double residual_sd(std::size_t m) const noexcept { return residual_sd_[m]; }
  /// E|zeta_m|^2.
  double convolution_variance(std::size_t m) const noexcept { return conv_var_[m]; }

  OuIncrement sample(const NoisePath& path, int n, int j, std::size_t m) const;

private:
  Stream stream_;
  std::vector<double> q_;
  std::vector<Complex> decay_;
  std::vector<Complex> regression_;
  std::vector<double> residual_sd_;
  std::vector<double> conv_var_;
};

/// Spec-level wrapper; rejects non-Linear configs.
std::vector<OuIncrement> joint_ou_increments(const NoisePath& path, int n, int j, const ModelConfig& cfg,
                                             const TimeGrid& grid, double lambda);

/// (1 - e^{-z}) / z, accurate for small |z|.
Complex phi1(Complex z);

}  // namespace sse
