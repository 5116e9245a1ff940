#pragma once

#include <sse/parareal.hpp>
#include <sse/types.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sse {

enum class StudyKind { ErrorVsK, OrderStudy, Invariant, Region, MomentsCheck };

enum class NonlinearityKind { Linear, Potential, SaturatedCubic };
enum class NoiseKind { Flat, PolyDecay };

/// Model description as written in a config file. build() turns it into a
/// ModelConfig; the potential is V(x) = potential_a + potential_b cos(2 pi x).
struct ModelSpec {
  double alpha = 1.0;
  double theta = 0.5;
  std::size_t modes = 10;
  NonlinearityKind nonlinearity = NonlinearityKind::Linear;
  double lambda = 0.0;
  double potential_a = 0.0;
  double potential_b = 0.0;
  NoiseKind noise = NoiseKind::Flat;
  double q_scale = 1.0;
  double q_decay = 0.0;
  /// u0^m = u0_scale / m + u0_sd * xi_m, xi_m real standard normal.
  double u0_scale = 0.0;
  double u0_sd = 0.0;

  ModelConfig build() const;
  bool operator==(const ModelSpec&) const = default;
};

struct StudySpec {
  StudyKind kind = StudyKind::ErrorVsK;
  // order study
  std::vector<double> dT_list;
  int k = 3;
  // invariant study: coarse scheme run to T = burn_in on grid.dT, J = 1
  double burn_in = 5.0;
  // region
  double alpha_min = 0.0, alpha_max = 5.0, lambda_min = 0.0, lambda_max = 5.0;
  int nx = 50, ny = 50;
  // moments check: n coarse steps on grid.dT
  int n = 10;
  bool operator==(const StudySpec&) const = default;
};

struct ExperimentConfig {
  ModelSpec model;
  TimeGrid grid;
  int k_max = 3;
  FineKind fine_kind = FineKind::ExpEuler;
  CoarseNoise coarse_noise = CoarseNoise::Increment;
  int paths = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  StudySpec study;
  std::string out;

  PararealConfig parareal() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the INI-style format
///   [section]
///   key = value   ; or # comments
/// Sections: model, grid, parareal, mc, study, output. Throws ConfigError with
/// the line number for syntax errors and the dotted key name for unknown,
/// duplicate or missing keys.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

/// Writes every field explicitly; parse_config_text(to_config_text(c)) == c.
std::string to_config_text(const ExperimentConfig& cfg);

/// Shortest round-trip decimal form of x ('.' decimal point, "inf"/"nan").
std::string format_double(double x);

}  // namespace sse
