#include <sse/parareal.hpp>

#include <sse/parallel.hpp>
#include <sse/spectral.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sse {

namespace {

void check_inputs(const SpectralField& u0, const NoisePath& path, const TimeGrid& grid) {
  grid.validate();
  if (path.intervals() != grid.N || path.fine_steps() != grid.J)
    throw std::invalid_argument("parareal: noise path does not match the time grid");
  if (u0.size() != path.modes()) throw std::invalid_argument("parareal: u0 length does not match the noise path");
}

bool all_finite(const std::vector<SpectralField>& us) {
  return std::all_of(us.begin(), us.end(), [](const SpectralField& u) { return u.all_finite(); });
}

std::vector<double> errors_against(const std::vector<SpectralField>& it, const std::vector<SpectralField>& ref) {
  std::vector<double> e(it.size());
  for (std::size_t n = 0; n < it.size(); ++n) {
    const double v = h_norm(it[n] - ref[n]);
    e[n] = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }
  return e;
}

}  // namespace

double PararealHistory::sup_error(int k) const {
  if (k < 0 || static_cast<std::size_t>(k) >= errors.size()) throw std::out_of_range("sup_error: no such iteration");
  double s = 0.0;
  for (double e : errors[k]) s = std::max(s, e);
  return s;
}

std::vector<SpectralField> coarse_sweep(const SpectralField& u0, const Propagator& coarse, const NoisePath& path,
                                        const TimeGrid& grid) {
  check_inputs(u0, path, grid);
  std::vector<SpectralField> out;
  out.reserve(static_cast<std::size_t>(grid.N) + 1);
  out.push_back(u0);
  for (int n = 0; n < grid.N; ++n) out.push_back(coarse.advance(out.back(), n, path));
  return out;
}

std::vector<SpectralField> fine_sweep(const std::vector<SpectralField>& prev, const Propagator& fine,
                                      const NoisePath& path, unsigned threads) {
  if (prev.empty()) throw std::invalid_argument("fine_sweep: empty iterate");
  std::vector<SpectralField> out(prev.size());
  out[0] = prev[0];
  parallel_for(prev.size() - 1, threads,
               [&](std::size_t i) { out[i + 1] = fine.advance(prev[i], static_cast<int>(i), path); });
  return out;
}

Correction correct(const SpectralField& u0, const std::vector<SpectralField>& fine,
                   const std::vector<SpectralField>& coarse_prev, const Propagator& coarse, const NoisePath& path) {
  if (fine.size() != coarse_prev.size() || fine.empty())
    throw std::invalid_argument("correct: fine and coarse sequences differ in length");
  Correction c;
  c.iterate.reserve(fine.size());
  c.coarse.reserve(fine.size());
  c.iterate.push_back(u0);
  c.coarse.push_back(u0);
  for (std::size_t n = 1; n < fine.size(); ++n) {
    SpectralField g = coarse.advance(c.iterate.back(), static_cast<int>(n - 1), path);
    // (G_new - G_old) + F: once the previous iterate stops moving the jump
    // cancels exactly and u_n reproduces the fine value bit for bit.
    SpectralField u = g - coarse_prev[n];
    u += fine[n];
    c.coarse.push_back(std::move(g));
    c.iterate.push_back(std::move(u));
  }
  return c;
}

std::vector<SpectralField> reference_fine_run(const SpectralField& u0, const Propagator& fine, const NoisePath& path,
                                              const TimeGrid& grid) {
  check_inputs(u0, path, grid);
  std::vector<SpectralField> out;
  out.reserve(static_cast<std::size_t>(grid.N) + 1);
  out.push_back(u0);
  for (int n = 0; n < grid.N; ++n) out.push_back(fine.advance(out.back(), n, path));
  return out;
}

PararealHistory run_parareal(const SpectralField& u0, const Propagator& coarse, const Propagator& fine,
                             const NoisePath& path, const TimeGrid& grid, const PararealConfig& pcfg) {
  if (pcfg.k_max < 0) throw std::invalid_argument("PararealConfig: k_max must be >= 0");
  if (pcfg.stop_tol && !(*pcfg.stop_tol >= 0.0)) throw std::invalid_argument("PararealConfig: stop_tol must be >= 0");
  check_inputs(u0, path, grid);

  PararealHistory h;
  if (pcfg.record_errors) h.reference = reference_fine_run(u0, fine, path, grid);

  auto record = [&](std::vector<SpectralField> it) {
    if (pcfg.record_errors) {
      h.errors.push_back(errors_against(it, h.reference));
    } else if (h.iterates.size() == 2) {
      h.iterates.erase(h.iterates.begin());
    }
    h.iterates.push_back(std::move(it));
  };

  std::vector<SpectralField> coarse_vals = coarse_sweep(u0, coarse, path, grid);
  record(coarse_vals);
  h.k_used = 0;
  if (!all_finite(h.iterates.back())) {
    h.stop = StopReason::Diverged;
    return h;
  }

  for (int k = 1; k <= pcfg.k_max; ++k) {
    const auto& prev = h.iterates.back();
    const auto fine_vals = fine_sweep(prev, fine, path, pcfg.threads);
    Correction c = correct(u0, fine_vals, coarse_vals, coarse, path);
    double increment = 0.0;
    for (std::size_t n = 0; n < prev.size(); ++n) increment = std::max(increment, h_norm(c.iterate[n] - prev[n]));
    coarse_vals = std::move(c.coarse);
    record(std::move(c.iterate));
    h.k_used = k;
    if (!all_finite(h.iterates.back())) {
      h.stop = StopReason::Diverged;
      return h;
    }
    if (pcfg.stop_tol && increment <= *pcfg.stop_tol) {
      h.stop = StopReason::Tolerance;
      return h;
    }
  }
  h.stop = StopReason::MaxIterations;
  return h;
}

PararealHistory run_parareal(const SpectralField& u0, const NoisePath& path, const ModelConfig& cfg,
                             const TimeGrid& grid, const PararealConfig& pcfg) {
  const ExpThetaCoarse coarse(cfg, grid, pcfg.coarse);
  const auto fine = make_fine_propagator(pcfg.fine_kind, cfg, grid);
  return run_parareal(u0, coarse, *fine, path, grid, pcfg);
}

}  // namespace sse
