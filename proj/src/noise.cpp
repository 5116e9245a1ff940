#include <sse/noise.hpp>

#include <sse/parallel.hpp>
#include <sse/philox.hpp>
#include <sse/spectral.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sse {

Complex standard_complex_normal(std::uint64_t seed, std::uint32_t n, std::uint32_t j, std::uint32_t m, Stream s) {
  const auto [a, b] = philox::normal_pair({n, j, m, static_cast<std::uint32_t>(s)}, seed);
  return {a, b};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  const philox::Counter ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0u,
                            static_cast<std::uint32_t>(Stream::SeedDerivation)};
  const auto r = philox::generate(ctr, philox::key_from_seed(seed));
  return (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
}

NoisePath::NoisePath(int N, int J, std::size_t modes, std::uint64_t seed, std::vector<Complex> increments)
    : N_(N), J_(J), M_(modes), seed_(seed), increments_(std::move(increments)) {
  if (N < 1 || J < 1 || modes < 1) throw std::invalid_argument("NoisePath: N, J and M must be >= 1");
  const std::size_t expected = static_cast<std::size_t>(N) * static_cast<std::size_t>(J) * modes;
  if (increments_.size() != expected)
    throw std::invalid_argument("NoisePath: expected " + std::to_string(expected) + " increments, got " +
                                std::to_string(increments_.size()));
}

NoisePath NoisePath::sample(const TimeGrid& grid, std::size_t modes, std::uint64_t seed, unsigned threads) {
  grid.validate();
  if (modes < 1) throw std::invalid_argument("NoisePath: M must be >= 1");
  const double sd = std::sqrt(grid.fine_step());
  const std::size_t block = static_cast<std::size_t>(grid.J) * modes;
  std::vector<Complex> inc(static_cast<std::size_t>(grid.N) * block);
  parallel_for(static_cast<std::size_t>(grid.N), threads, [&](std::size_t n) {
    for (int j = 0; j < grid.J; ++j)
      for (std::size_t m = 0; m < modes; ++m)
        inc[n * block + static_cast<std::size_t>(j) * modes + m] =
            sd * standard_complex_normal(seed, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(j),
                                         static_cast<std::uint32_t>(m), Stream::Increment);
  });
  return NoisePath(grid.N, grid.J, modes, seed, std::move(inc));
}

std::size_t NoisePath::offset(int n, int j) const {
  if (n < 0 || n >= N_ || j < 0 || j >= J_)
    throw std::out_of_range("NoisePath index (n=" + std::to_string(n) + ", j=" + std::to_string(j) +
                            ") out of range");
  return (static_cast<std::size_t>(n) * static_cast<std::size_t>(J_) + static_cast<std::size_t>(j)) * M_;
}

Complex NoisePath::fine_increment(int n, int j, std::size_t m) const {
  if (m >= M_) throw std::out_of_range("NoisePath mode index out of range");
  return increments_[offset(n, j) + m];
}

std::span<const Complex> NoisePath::fine_increments(int n, int j) const {
  return std::span<const Complex>(increments_).subspan(offset(n, j), M_);
}

Complex NoisePath::coarse_increment(int n, std::size_t m) const {
  if (m >= M_) throw std::out_of_range("NoisePath mode index out of range");
  const std::size_t base = offset(n, 0);
  Complex s = 0.0;
  for (int j = 0; j < J_; ++j) s += increments_[base + static_cast<std::size_t>(j) * M_ + m];
  return s;
}

std::vector<Complex> NoisePath::coarse_increments(int n) const {
  std::vector<Complex> out(M_);
  for (std::size_t m = 0; m < M_; ++m) out[m] = coarse_increment(n, m);
  return out;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  os.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 8)) throw std::runtime_error("NoisePath::load: truncated input");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void NoisePath::dump(std::ostream& os) const {
  put_u64(os, static_cast<std::uint64_t>(N_));
  put_u64(os, static_cast<std::uint64_t>(J_));
  put_u64(os, static_cast<std::uint64_t>(M_));
  put_u64(os, seed_);
  for (const auto& c : increments_) {
    put_u64(os, std::bit_cast<std::uint64_t>(c.real()));
    put_u64(os, std::bit_cast<std::uint64_t>(c.imag()));
  }
}

NoisePath NoisePath::load(std::istream& is) {
  const auto N = get_u64(is);
  const auto J = get_u64(is);
  const auto M = get_u64(is);
  const auto seed = get_u64(is);
  constexpr std::uint64_t kLimit = 1ull << 31;
  if (N == 0 || J == 0 || M == 0 || N >= kLimit || J >= kLimit || M >= kLimit)
    throw std::runtime_error("NoisePath::load: invalid header");
  std::vector<Complex> inc(N * J * M);
  for (auto& c : inc) {
    const double re = std::bit_cast<double>(get_u64(is));
    const double im = std::bit_cast<double>(get_u64(is));
    c = {re, im};
  }
  return NoisePath(static_cast<int>(N), static_cast<int>(J), static_cast<std::size_t>(M), seed, std::move(inc));
}

SpectralField apply_sqrt_q(const QSpec& q, std::span<const Complex> dW) {
  if (q.size() != dW.size())
    throw std::invalid_argument("apply_sqrt_q: " + std::to_string(q.size()) + " amplitudes vs " +
                                std::to_string(dW.size()) + " increments");
  SpectralField out(dW.size());
  for (std::size_t m = 0; m < dW.size(); ++m) out[m] = q[m] * dW[m];
  return out;
}

Complex phi1(Complex z) {
  if (z == Complex(0.0)) return 1.0;
  // e^{w} - 1 for w = -z, without cancellation in the real part.
  const double x = -z.real(), y = -z.imag();
  const double s = std::sin(0.5 * y);
  const Complex em1(std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y));
  return -em1 / z;
}

OuIncrementSampler::OuIncrementSampler(const ModelConfig& cfg, double dt, double lambda, Stream stream)
    : stream_(stream), q_(cfg.q.amplitudes) {
  const std::size_t M = cfg.modes;
  decay_.resize(M);
  regression_.resize(M);
  residual_sd_.resize(M);
  conv_var_.resize(M);
  const double two_alpha_dt = 2.0 * cfg.alpha * dt;
  // (1 - e^{-2 alpha dt}) / alpha = 2 dt * phi1(2 alpha dt); tends to 2 dt as alpha -> 0.
  const double var_unit = 2.0 * dt * phi1(Complex(two_alpha_dt)).real();
  for (std::size_t m = 0; m < M; ++m) {
    const Complex kappa = eigenvalue(static_cast<int>(m + 1), cfg.alpha) - Complex(0.0, lambda);
    decay_[m] = std::exp(-kappa * dt);
    regression_[m] = phi1(kappa * dt);
    const double q2 = q_[m] * q_[m];
    conv_var_[m] = q2 * var_unit;
    const double resid = q2 * (var_unit - 2.0 * dt * std::norm(regression_[m]));
    residual_sd_[m] = std::sqrt(std::max(resid, 0.0));
  }
}

OuIncrement OuIncrementSampler::sample(const NoisePath& path, int n, int j, std::size_t m) const {
  const Complex db = path.fine_increment(n, j, m);
  // E|a + ib|^2 = 2 for standard complex normals.
  const Complex r = (residual_sd_[m] * std::numbers::sqrt2 * 0.5) *
                    standard_complex_normal(path.seed(), static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(j),
                                            static_cast<std::uint32_t>(m), stream_);
  return {db, regression_[m] * q_[m] * db + r};
}

std::vector<OuIncrement> joint_ou_increments(const NoisePath& path, int n, int j, const ModelConfig& cfg,
                                             const TimeGrid& grid, double lambda) {
  if (!cfg.is_linear()) throw std::invalid_argument("joint_ou_increments requires a Linear nonlinearity");
  const OuIncrementSampler sampler(cfg, grid.fine_step(), lambda);
  std::vector<OuIncrement> out(cfg.modes);
  for (std::size_t m = 0; m < cfg.modes; ++m) out[m] = sampler.sample(path, n, j, m);
  return out;
}

}  // namespace sse
