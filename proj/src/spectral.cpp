#include <sse/spectral.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sse {

namespace {

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b)
    throw std::invalid_argument("SpectralField length mismatch: " + std::to_string(a) + " vs " +
                                std::to_string(b));
}

}  // namespace

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_size(size(), other.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_size(size(), other.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(Complex factor) noexcept {
  for (auto& c : coeffs_) c *= factor;
  return *this;
}

bool SpectralField::all_finite() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

QSpec QSpec::flat(std::size_t modes, double c) { return QSpec{std::vector<double>(modes, c)}; }

QSpec QSpec::poly_decay(std::size_t modes, double c, double s) {
  QSpec q;
  q.amplitudes.resize(modes);
  for (std::size_t i = 0; i < modes; ++i) q.amplitudes[i] = c * std::pow(static_cast<double>(i + 1), -s);
  return q;
}

double ModelConfig::linear_lambda() const {
  if (const auto* lin = std::get_if<Linear>(&nonlinearity)) return lin->lambda;
  throw std::invalid_argument("operation requires a Linear nonlinearity");
}

void ModelConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite and >= 0");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
  if (modes < 1) throw std::invalid_argument("modes must be >= 1");
  if (q.size() != modes)
    throw std::invalid_argument("noise amplitudes: expected " + std::to_string(modes) + " entries, got " +
                                std::to_string(q.size()));
  for (double qm : q.amplitudes)
    if (!(qm >= 0.0) || !std::isfinite(qm)) throw std::invalid_argument("noise amplitudes must be finite and >= 0");
  if (const auto* pot = std::get_if<Potential>(&nonlinearity)) {
    if (pot->values.size() < 2 * modes + 1)
      throw std::invalid_argument("potential needs at least 2M+1 collocation samples");
    for (double v : pot->values)
      if (!std::isfinite(v)) throw std::invalid_argument("potential values must be finite");
  }
}

void TimeGrid::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("horizon T must be finite and > 0");
  if (N < 1) throw std::invalid_argument("coarse interval count N must be >= 1");
  if (J < 1) throw std::invalid_argument("fine step count J must be >= 1");
}

Complex eigenvalue(int m, double alpha) {
  if (m < 1) throw std::invalid_argument("mode number must be >= 1");
  const double k = m * std::numbers::pi;
  return {alpha, k * k};
}

std::vector<Complex> semigroup_factors(std::size_t modes, double alpha, double t) {
  std::vector<Complex> out(modes);
  for (std::size_t i = 0; i < modes; ++i) out[i] = std::exp(-eigenvalue(static_cast<int>(i + 1), alpha) * t);
  return out;
}

SpectralField semigroup_apply(const SpectralField& u, double t, double alpha) {
  if (!(t >= 0.0)) throw std::invalid_argument("semigroup time must be >= 0");
  const auto f = semigroup_factors(u.size(), alpha, t);
  SpectralField out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = f[i] * u[i];
  return out;
}

SpectralField semigroup_apply(const SpectralField& u, double t, const ModelConfig& cfg) {
  return semigroup_apply(u, t, cfg.alpha);
}

double h_norm(const SpectralField& u) {
  double s = 0.0;
  for (const auto& c : u) s += std::norm(c);
  return std::sqrt(s);
}

double hs_norm(const SpectralField& u, double s, double alpha) {
  if (s == 0.0) return h_norm(u);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    acc += std::norm(u[i]) * std::pow(std::abs(eigenvalue(static_cast<int>(i + 1), alpha)), s);
  return std::sqrt(acc);
}

Collocation::Collocation(std::size_t modes, std::size_t points)
    : modes_(modes), points_(points), basis_(modes * points) {
  if (points < modes) throw std::invalid_argument("collocation needs at least as many points as modes");
  const double dx = spacing();
  for (std::size_t p = 0; p < points_; ++p)
    for (std::size_t m = 0; m < modes_; ++m)
      basis_[p * modes_ + m] =
          std::numbers::sqrt2 * std::sin(static_cast<double>(m + 1) * std::numbers::pi * static_cast<double>(p + 1) * dx);
}

std::vector<Complex> Collocation::synthesize(const SpectralField& u) const {
  require_same_size(u.size(), modes_);
  std::vector<Complex> g(points_);
  for (std::size_t p = 0; p < points_; ++p) {
    Complex acc = 0.0;
    const double* row = &basis_[p * modes_];
    for (std::size_t m = 0; m < modes_; ++m) acc += row[m] * u[m];
    g[p] = acc;
  }
  return g;
}

SpectralField Collocation::analyze(const std::vector<Complex>& g) const {
  require_same_size(g.size(), points_);
  SpectralField u(modes_);
  const double dx = spacing();
  for (std::size_t p = 0; p < points_; ++p) {
    const double* row = &basis_[p * modes_];
    for (std::size_t m = 0; m < modes_; ++m) u[m] += row[m] * g[p];
  }
  u *= dx;
  return u;
}

Complex Collocation::inner(const std::vector<Complex>& a, const std::vector<Complex>& b) const {
  require_same_size(a.size(), b.size());
  Complex acc = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) acc += std::conj(a[p]) * b[p];
  return acc * spacing();
}

std::size_t collocation_points(const ModelConfig& cfg) {
  if (const auto* pot = std::get_if<Potential>(&cfg.nonlinearity)) return pot->values.size();
  return 2 * cfg.modes + 1;
}

NonlinearTerm::NonlinearTerm(const ModelConfig& cfg) : kind_(cfg.nonlinearity) {
  lipschitz_ = lipschitz_bound(cfg);
  if (!std::holds_alternative<Linear>(kind_)) colloc_.emplace(cfg.modes, collocation_points(cfg));
}

std::vector<Complex> NonlinearTerm::pointwise(const std::vector<Complex>& g) const {
  std::vector<Complex> out(g.size());
  if (const auto* pot = std::get_if<Potential>(&kind_)) {
    require_same_size(g.size(), pot->values.size());
    for (std::size_t p = 0; p < g.size(); ++p) out[p] = pot->values[p] * g[p];
  } else if (const auto* sat = std::get_if<SaturatedCubic>(&kind_)) {
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double r2 = std::norm(g[p]);
      out[p] = (sat->lambda * r2 / (1.0 + r2)) * g[p];
    }
  } else {
    const double lambda = std::get<Linear>(kind_).lambda;
    for (std::size_t p = 0; p < g.size(); ++p) out[p] = lambda * g[p];
  }
  return out;
}

SpectralField NonlinearTerm::operator()(const SpectralField& u) const {
  if (const auto* lin = std::get_if<Linear>(&kind_)) {
    SpectralField out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = lin->lambda * u[i];
    return out;
  }
  return colloc_->analyze(pointwise(colloc_->synthesize(u)));
}

SpectralField eval_nonlinearity(const SpectralField& u, const ModelConfig& cfg) { return NonlinearTerm(cfg)(u); }

double lipschitz_bound(const ModelConfig& cfg) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return std::abs(f.lambda);
        } else if constexpr (std::is_same_v<T, Potential>) {
          double m = 0.0;
          for (double v : f.values) m = std::max(m, std::abs(v));
          return m;
        } else {
          // The radial derivative of r^3/(1+r^2) peaks at 9/8 and the angular
          // stretch r^2/(1+r^2) stays below 1; 2 dominates both.
          return 2.0 * std::abs(f.lambda);
        }
      },
      cfg.nonlinearity);
}

}  // namespace sse
