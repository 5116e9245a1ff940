#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace sse {

using Complex = std::complex<double>;

/// Coefficients u^m = <u, e_m> of a state in the Dirichlet sine basis
/// e_m(x) = sqrt(2) sin(m pi x). Entry 0 holds mode m = 1.
class SpectralField {
public:
  SpectralField() = default;
  explicit SpectralField(std::size_t modes) : coeffs_(modes) {}
  explicit SpectralField(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {}

  std::size_t size() const noexcept { return coeffs_.size(); }
  Complex& operator[](std::size_t i) noexcept { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return coeffs_[i]; }

  std::span<Complex> coeffs() noexcept { return coeffs_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  auto begin() noexcept { return coeffs_.begin(); }
  auto end() noexcept { return coeffs_.end(); }
  auto begin() const noexcept { return coeffs_.begin(); }
  auto end() const noexcept { return coeffs_.end(); }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(Complex factor) noexcept;

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(Complex s, SpectralField a) noexcept { return a *= s; }

  bool all_finite() const noexcept;
  bool operator==(const SpectralField&) const = default;

private:
  std::vector<Complex> coeffs_;
};

/// Diagonal noise covariance: amplitudes[m-1] = ||Q^{1/2} e_m||.
struct QSpec {
  std::vector<double> amplitudes;

  static QSpec flat(std::size_t modes, double c);
  /// q_m = c * m^{-s}.
  static QSpec poly_decay(std::size_t modes, double c, double s);
  static QSpec zero(std::size_t modes) { return flat(modes, 0.0); }

  std::size_t size() const noexcept { return amplitudes.size(); }
  double operator[](std::size_t i) const noexcept { return amplitudes[i]; }
  bool operator==(const QSpec&) const = default;
};

/// F(u) = lambda u.
struct Linear {
  double lambda = 0.0;
  bool operator==(const Linear&) const = default;
};

/// F(u)(x) = V(x) u(x) for a real potential sampled on the interior
/// collocation points x_p = p / (P + 1), p = 1..P, with P >= 2M + 1.
struct Potential {
  std::vector<double> values;

  template <class Fn>
  static Potential sampled(std::size_t modes, Fn&& v, std::size_t points = 0) {
    if (points == 0) points = 2 * modes + 1;
    Potential p;
    p.values.resize(points);
    for (std::size_t i = 0; i < points; ++i)
      p.values[i] = v(static_cast<double>(i + 1) / static_cast<double>(points + 1));
    return p;
  }
  bool operator==(const Potential&) const = default;
};

/// F(u)(x) = lambda |u|^2 u / (1 + |u|^2), evaluated by collocation.
struct SaturatedCubic {
  double lambda = 0.0;
  bool operator==(const SaturatedCubic&) const = default;
};

using Nonlinearity = std::variant<Linear, Potential, SaturatedCubic>;

struct ModelConfig {
  double alpha = 0.0;  ///< damping, >= 0
  double theta = 0.5;  ///< implicitness weight in [0, 1]
  std::size_t modes = 1;
  Nonlinearity nonlinearity = Linear{};
  QSpec q;

  bool is_linear() const noexcept { return std::holds_alternative<Linear>(nonlinearity); }
  /// lambda of a Linear nonlinearity; throws std::invalid_argument otherwise.
  double linear_lambda() const;
  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

/// Uniform two-level partition of [0, T]: N coarse intervals, J fine steps each.
struct TimeGrid {
  double T = 1.0;
  int N = 1;
  int J = 1;

  double coarse_step() const noexcept { return T / N; }
  double fine_step() const noexcept { return coarse_step() / J; }
  /// t_{n,j} = (n J + j) dt, so that t_{n,J} == t_{n+1,0} bit for bit.
  double time(int n, int j) const noexcept {
    return static_cast<double>(static_cast<long long>(n) * J + j) * fine_step();
  }
  double coarse_time(int n) const noexcept { return time(n, 0); }

  void validate() const;
  bool operator==(const TimeGrid&) const = default;
};

}  // namespace sse
