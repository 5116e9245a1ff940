#pragma once

#include <sse/noise.hpp>
#include <sse/propagators.hpp>
#include <sse/types.hpp>

#include <optional>
#include <vector>

namespace sse {

struct PararealConfig {
  FineKind fine_kind = FineKind::ExpEuler;
  CoarseOptions coarse{};
  int k_max = 0;
  /// Stop once max_n ||u_n^(k) - u_n^(k-1)|| <= stop_tol. Disabled by default.
  std::optional<double> stop_tol;
  /// Keep every iterate and record errors against the sequential fine run.
  bool record_errors = true;
  /// Workers for the fine sweeps.
  unsigned threads = 1;
};

enum class StopReason { MaxIterations, Tolerance, Diverged };

struct PararealHistory {
  /// iterates[k][n], n = 0..N. With record_errors unset only the last two
  /// iterations are kept (iterates.size() <= 2).
  std::vector<std::vector<SpectralField>> iterates;
  /// Sequential fine solution v_{n,0}, n = 0..N (empty without record_errors).
  std::vector<SpectralField> reference;
  /// errors[k][n] = ||u_n^(k) - v_{n,0}|| (empty without record_errors).
  std::vector<std::vector<double>> errors;
  int k_used = 0;
  StopReason stop = StopReason::MaxIterations;

  const std::vector<SpectralField>& final_iterate() const { return iterates.back(); }
  /// sup_n errors[k][n].
  double sup_error(int k) const;
};

/// Iteration k = 0: u_n = G(u_{n-1}) from u_0. Returns N + 1 fields.
std::vector<SpectralField> coarse_sweep(const SpectralField& u0, const Propagator& coarse, const NoisePath& path,
                                        const TimeGrid& grid);

/// out[n] = F(T_n, T_{n-1}, prev[n-1]) for n = 1..N; out[0] = prev[0]. Intervals
/// run concurrently on up to `threads` workers with identical results.
std::vector<SpectralField> fine_sweep(const std::vector<SpectralField>& prev, const Propagator& fine,
                                      const NoisePath& path, unsigned threads = 1);

struct Correction {
  std::vector<SpectralField> iterate;  ///< u_n^(k), n = 0..N
  std::vector<SpectralField> coarse;   ///< G(u_{n-1}^(k)), index n = 1..N; [0] = u_0
};

/// Sequential update u_n^(k) = G(u_{n-1}^(k)) + F(u_{n-1}^(k-1)) - G(u_{n-1}^(k-1)).
/// `fine` and `coarse_prev` are indexed like the outputs of fine_sweep and
/// Correction::coarse for iteration k - 1.
Correction correct(const SpectralField& u0, const std::vector<SpectralField>& fine,
                   const std::vector<SpectralField>& coarse_prev, const Propagator& coarse, const NoisePath& path);

/// v_{n+1,0} = F(T_{n+1}, T_n, v_{n,0}) from v_{0,0} = u_0, sequentially.
std::vector<SpectralField> reference_fine_run(const SpectralField& u0, const Propagator& fine, const NoisePath& path,
                                              const TimeGrid& grid);

PararealHistory run_parareal(const SpectralField& u0, const Propagator& coarse, const Propagator& fine,
                             const NoisePath& path, const TimeGrid& grid, const PararealConfig& pcfg);

/// Builds the exponential theta coarse propagator and the configured fine one.
PararealHistory run_parareal(const SpectralField& u0, const NoisePath& path, const ModelConfig& cfg,
                             const TimeGrid& grid, const PararealConfig& pcfg);

}  // namespace sse
