// Command-line driver for the Monte Carlo studies.
//
//   sse-parareal error-vs-k --config configs/converge1_theta05.ini --out e.csv
//
// Exit codes: 0 ok, 1 runtime failure, 2 bad config, 3 divergence (--strict).

#include <sse/errors.hpp>
#include <sse/harness.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<unsigned> threads;
  bool strict = false;
};

int run(sse::StudyKind expected, const std::string& name, const Options& opt) {
  sse::ExperimentConfig cfg;
  try {
    cfg = sse::parse_config(opt.config);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.paths) {
      if (*opt.paths < 1) throw sse::ConfigError("--paths must be >= 1");
      cfg.paths = *opt.paths;
    }
    if (opt.threads) cfg.threads = std::max(1u, *opt.threads);
    if (cfg.study.kind != expected)
      throw sse::ConfigError("config describes a different study than '" + name + "' (see study.kind)");
  } catch (const sse::ConfigError& e) {
    std::cerr << opt.config << ": " << e.what() << "\n";
    return 2;
  }

  const std::string out = opt.out.empty() ? cfg.out : opt.out;
  if (out.empty()) {
    std::cerr << "no output path: pass --out or set output.csv\n";
    return 2;
  }

  sse::StudyOutput res;
  try {
    res = sse::run_study(cfg);
  } catch (const sse::ConfigError& e) {
    std::cerr << opt.config << ": " << e.what() << "\n";
    return 2;
  } catch (const sse::ContractionViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sse::Divergence& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return opt.strict ? 3 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    sse::write_text_file(out, res.csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (res.diverged) {
    std::cerr << "warning: non-finite errors (unstable regime); rows reported as inf\n";
    if (opt.strict) return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parareal exponential theta-scheme for the damped stochastic Schroedinger equation"};
  app.require_subcommand(1);

  Options opt;
  const std::map<std::string, std::pair<sse::StudyKind, std::string>> commands = {
      {"error-vs-k", {sse::StudyKind::ErrorVsK, "mean-square parareal error against the fine solution per iteration"}},
      {"order-study", {sse::StudyKind::OrderStudy, "error at fixed k over a list of coarse steps, with fitted slope"}},
      {"invariant", {sse::StudyKind::Invariant, "long-run ensemble moments against the invariant law"}},
      {"region", {sse::StudyKind::Region, "stability raster over (alpha, lambda)"}},
      {"moments-check", {sse::StudyKind::MomentsCheck, "ensemble moments against the closed-form theta-scheme law"}},
  };

  for (const auto& [name, spec] : commands) {
    auto* sub = app.add_subcommand(name, spec.second);
    sub->add_option("--config", opt.config, "experiment config (.ini)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "CSV output path (overrides output.csv)");
    sub->add_option("--seed", opt.seed, "override mc.seed");
    sub->add_option("--paths", opt.paths, "override mc.paths");
    sub->add_option("--threads", opt.threads, "override mc.threads");
    sub->add_flag("--strict", opt.strict, "exit with status 3 when the study diverges");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (const auto& [name, spec] : commands)
    if (app.got_subcommand(name)) return run(spec.first, name, opt);
  return 2;
}
