#include <sse/config.hpp>

#include <sse/errors.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace sse {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model",
       {"alpha", "theta", "modes", "nonlinearity", "lambda", "potential_a", "potential_b", "noise", "q_scale",
        "q_decay", "u0_scale", "u0_sd"}},
      {"grid", {"T", "N", "dT", "J", "dt"}},
      {"parareal", {"k_max", "fine", "coarse_noise"}},
      {"mc", {"paths", "seed", "threads"}},
      {"study",
       {"kind", "dT_list", "k", "burn_in", "alpha_min", "alpha_max", "lambda_min", "lambda_max", "nx", "ny", "n"}},
      {"output", {"csv"}},
  };
  return keys;
}

class Reader {
public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  const Entry& require(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
  }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      require(key);
    }
    const Entry& e = entries_.at(key);
    return parse_real(key, e);
  }

  long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      require(key);
    }
    const Entry& e = entries_.at(key);
    long long v = 0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    auto [p, ec] = std::from_chars(b, end, v);
    if (ec != std::errc{} || p != end) throw ConfigError("'" + key + "' expects an integer, got '" + e.value + "'", e.line);
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? entries_.at(key).value : fallback;
  }

  int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

  std::vector<double> real_list(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const Entry& e = entries_.at(key);
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, {trim(item), e.line}));
    return out;
  }

private:
  static double parse_real(const std::string& key, const Entry& e) {
    double v = 0.0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    auto [p, ec] = std::from_chars(b, end, v);
    if (ec != std::errc{} || p != end) throw ConfigError("'" + key + "' expects a number, got '" + e.value + "'", e.line);
    return v;
  }

  std::map<std::string, Entry> entries_;
};

template <class Enum>
Enum pick(const Reader& r, const std::string& key, const std::map<std::string, Enum>& choices, Enum fallback) {
  if (!r.has(key)) return fallback;
  const std::string v = r.text(key, "");
  auto it = choices.find(v);
  if (it == choices.end()) {
    std::string names;
    for (const auto& [name, _] : choices) names += (names.empty() ? "" : ", ") + name;
    throw ConfigError("'" + key + "' must be one of {" + names + "}, got '" + v + "'", r.line(key));
  }
  return it->second;
}

template <class Enum>
std::string name_of(const std::map<std::string, Enum>& choices, Enum v) {
  for (const auto& [name, e] : choices)
    if (e == v) return name;
  return "?";
}

const std::map<std::string, NonlinearityKind> kNonlinearity = {
    {"linear", NonlinearityKind::Linear},
    {"potential", NonlinearityKind::Potential},
    {"saturated_cubic", NonlinearityKind::SaturatedCubic},
};
const std::map<std::string, NoiseKind> kNoise = {{"flat", NoiseKind::Flat}, {"poly_decay", NoiseKind::PolyDecay}};
const std::map<std::string, FineKind> kFine = {{"exp_euler", FineKind::ExpEuler},
                                               {"exact_linear", FineKind::ExactLinear}};
const std::map<std::string, CoarseNoise> kCoarseNoise = {{"increment", CoarseNoise::Increment},
                                                         {"exact_convolution", CoarseNoise::ExactConvolution}};
const std::map<std::string, StudyKind> kStudy = {
    {"error_vs_k", StudyKind::ErrorVsK}, {"order_study", StudyKind::OrderStudy}, {"invariant", StudyKind::Invariant},
    {"region", StudyKind::Region},       {"moments_check", StudyKind::MomentsCheck},
};

int positive_int(long long v, const std::string& key, int line) {
  if (v < 1 || v > 1'000'000'000) throw ConfigError("'" + key + "' must be a positive integer", line);
  return static_cast<int>(v);
}

/// Nearest integer to x when x is one up to rounding, else nullopt.
std::optional<int> near_integer(double x) {
  const double r = std::round(x);
  if (r < 1.0 || std::abs(x - r) > 1e-9 * r) return std::nullopt;
  return static_cast<int>(r);
}

TimeGrid read_grid(const Reader& r) {
  TimeGrid g;
  g.T = r.real("grid.T");
  if (!(g.T > 0.0) || !std::isfinite(g.T)) throw ConfigError("'grid.T' must be positive", r.line("grid.T"));
  if (r.has("grid.N")) {
    g.N = positive_int(r.integer("grid.N"), "grid.N", r.line("grid.N"));
    if (r.has("grid.dT") && std::abs(g.T / g.N - r.real("grid.dT")) > 1e-12 * g.T)
      throw ConfigError("'grid.dT' is inconsistent with grid.T / grid.N", r.line("grid.dT"));
  } else {
    // dT may also follow from the fine step: dT = J dt.
    const bool from_fine = !r.has("grid.dT") && r.has("grid.J") && r.has("grid.dt");
    const double dT = from_fine ? r.integer("grid.J") * r.real("grid.dt") : r.real("grid.dT");
    auto n = dT > 0.0 ? near_integer(g.T / dT) : std::nullopt;
    if (!n && from_fine) throw ConfigError("'grid.dt' times grid.J must divide grid.T", r.line("grid.dt"));
    if (!n) throw ConfigError("'grid.dT' must divide grid.T", r.line("grid.dT"));
    g.N = *n;
  }
  if (r.has("grid.J")) {
    g.J = positive_int(r.integer("grid.J"), "grid.J", r.line("grid.J"));
    if (r.has("grid.dt") && std::abs(g.fine_step() - r.real("grid.dt")) > 1e-12 * g.T)
      throw ConfigError("'grid.dt' is inconsistent with dT / grid.J", r.line("grid.dt"));
  } else {
    const double dt = r.real("grid.dt");
    auto j = dt > 0.0 ? near_integer(g.coarse_step() / dt) : std::nullopt;
    if (!j) throw ConfigError("'grid.dt' must divide the coarse step", r.line("grid.dt"));
    g.J = *j;
  }
  return g;
}

}  // namespace

ModelConfig ModelSpec::build() const {
  ModelConfig c;
  c.alpha = alpha;
  c.theta = theta;
  c.modes = modes;
  switch (nonlinearity) {
    case NonlinearityKind::Linear:
      c.nonlinearity = Linear{lambda};
      break;
    case NonlinearityKind::SaturatedCubic:
      c.nonlinearity = SaturatedCubic{lambda};
      break;
    case NonlinearityKind::Potential: {
      const double a = potential_a, b = potential_b;
      c.nonlinearity = Potential::sampled(modes, [a, b](double x) { return a + b * std::cos(2.0 * std::numbers::pi * x); });
      break;
    }
  }
  c.q = noise == NoiseKind::Flat ? QSpec::flat(modes, q_scale) : QSpec::poly_decay(modes, q_scale, q_decay);
  return c;
}

PararealConfig ExperimentConfig::parareal() const {
  PararealConfig p;
  p.fine_kind = fine_kind;
  p.coarse.noise = coarse_noise;
  p.k_max = k_max;
  p.record_errors = true;
  p.threads = 1;
  return p;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known_keys().count(section)) throw ConfigError("unknown section '[" + section + "]'", lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    if (section.empty()) throw ConfigError("key outside of any section", lineno);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::string full = section + "." + key;
    if (!known_keys().at(section).count(key)) throw ConfigError("unknown key '" + full + "'", lineno);
    if (value.empty()) throw ConfigError("empty value for '" + full + "'", lineno);
    if (entries.count(full)) throw ConfigError("duplicate key '" + full + "'", lineno);
    entries[full] = {value, lineno};
  }

  const Reader r(std::move(entries));
  ExperimentConfig c;

  ModelSpec& m = c.model;
  m.alpha = r.real("model.alpha");
  m.theta = r.real("model.theta");
  const long long modes = r.integer("model.modes");
  m.modes = static_cast<std::size_t>(positive_int(modes, "model.modes", r.line("model.modes")));
  m.nonlinearity = pick(r, "model.nonlinearity", kNonlinearity, NonlinearityKind::Linear);
  if (m.nonlinearity == NonlinearityKind::Potential) {
    m.potential_a = r.real("model.potential_a");
    m.potential_b = r.real("model.potential_b", 0.0);
    m.lambda = r.real("model.lambda", 0.0);
  } else {
    m.lambda = r.real("model.lambda");
    m.potential_a = r.real("model.potential_a", 0.0);
    m.potential_b = r.real("model.potential_b", 0.0);
  }
  m.noise = pick(r, "model.noise", kNoise, NoiseKind::Flat);
  m.q_scale = r.real("model.q_scale", 1.0);
  m.q_decay = r.real("model.q_decay", 0.0);
  m.u0_scale = r.real("model.u0_scale", 0.0);
  m.u0_sd = r.real("model.u0_sd", 0.0);
  if (m.u0_sd < 0.0) throw ConfigError("'model.u0_sd' must be >= 0", r.line("model.u0_sd"));
  try {
    m.build().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[model] ") + e.what());
  }

  c.grid = read_grid(r);

  c.k_max = static_cast<int>(r.integer("parareal.k_max", 3));
  if (c.k_max < 0) throw ConfigError("'parareal.k_max' must be >= 0", r.line("parareal.k_max"));
  c.fine_kind = pick(r, "parareal.fine", kFine, FineKind::ExpEuler);
  c.coarse_noise = pick(r, "parareal.coarse_noise", kCoarseNoise, CoarseNoise::Increment);

  c.paths = positive_int(r.integer("mc.paths", 1000), "mc.paths", r.line("mc.paths"));
  const long long seed = r.integer("mc.seed", 1);
  if (seed < 0) throw ConfigError("'mc.seed' must be >= 0", r.line("mc.seed"));
  c.seed = static_cast<std::uint64_t>(seed);
  c.threads = static_cast<unsigned>(positive_int(r.integer("mc.threads", 1), "mc.threads", r.line("mc.threads")));

  StudySpec& s = c.study;
  if (!r.has("study.kind")) r.require("study.kind");
  s.kind = pick(r, "study.kind", kStudy, StudyKind::ErrorVsK);
  s.dT_list = r.real_list("study.dT_list");
  s.k = static_cast<int>(r.integer("study.k", 3));
  s.burn_in = r.real("study.burn_in", 5.0);
  s.alpha_min = r.real("study.alpha_min", 0.0);
  s.alpha_max = r.real("study.alpha_max", 5.0);
  s.lambda_min = r.real("study.lambda_min", 0.0);
  s.lambda_max = r.real("study.lambda_max", 5.0);
  s.nx = static_cast<int>(r.integer("study.nx", 50));
  s.ny = static_cast<int>(r.integer("study.ny", 50));
  s.n = static_cast<int>(r.integer("study.n", 10));
  switch (s.kind) {
    case StudyKind::OrderStudy:
      if (s.dT_list.empty()) r.require("study.dT_list");
      if (s.k < 0) throw ConfigError("'study.k' must be >= 0", r.line("study.k"));
      break;
    case StudyKind::Region:
      if (!(s.alpha_max > s.alpha_min) || !(s.lambda_max > s.lambda_min))
        throw ConfigError("[study] empty alpha/lambda range");
      if (s.nx < 1 || s.ny < 1) throw ConfigError("[study] nx and ny must be >= 1");
      break;
    case StudyKind::Invariant:
      if (!(m.alpha > 0.0)) throw ConfigError("invariant study requires model.alpha > 0", r.line("model.alpha"));
      if (!(s.burn_in > 0.0)) throw ConfigError("'study.burn_in' must be positive", r.line("study.burn_in"));
      break;
    case StudyKind::MomentsCheck:
      if (m.nonlinearity != NonlinearityKind::Linear) throw ConfigError("moments check requires a linear model");
      if (s.n < 0) throw ConfigError("'study.n' must be >= 0", r.line("study.n"));
      break;
    case StudyKind::ErrorVsK:
      break;
  }

  c.out = r.text("output.csv", "");
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream o;
  const auto& m = c.model;
  o << "[model]\n"
    << "alpha = " << format_double(m.alpha) << "\n"
    << "theta = " << format_double(m.theta) << "\n"
    << "modes = " << m.modes << "\n"
    << "nonlinearity = " << name_of(kNonlinearity, m.nonlinearity) << "\n";
  o << "lambda = " << format_double(m.lambda) << "\n"
    << "potential_a = " << format_double(m.potential_a) << "\n"
    << "potential_b = " << format_double(m.potential_b) << "\n"
    << "noise = " << name_of(kNoise, m.noise) << "\n"
    << "q_scale = " << format_double(m.q_scale) << "\n"
    << "q_decay = " << format_double(m.q_decay) << "\n"
    << "u0_scale = " << format_double(m.u0_scale) << "\n"
    << "u0_sd = " << format_double(m.u0_sd) << "\n\n";
  o << "[grid]\n"
    << "T = " << format_double(c.grid.T) << "\n"
    << "N = " << c.grid.N << "\n"
    << "J = " << c.grid.J << "\n\n";
  o << "[parareal]\n"
    << "k_max = " << c.k_max << "\n"
    << "fine = " << name_of(kFine, c.fine_kind) << "\n"
    << "coarse_noise = " << name_of(kCoarseNoise, c.coarse_noise) << "\n\n";
  o << "[mc]\n"
    << "paths = " << c.paths << "\n"
    << "seed = " << c.seed << "\n"
    << "threads = " << c.threads << "\n\n";
  const auto& s = c.study;
  o << "[study]\n"
    << "kind = " << name_of(kStudy, s.kind) << "\n";
  if (!s.dT_list.empty()) {
    o << "dT_list = ";
    for (std::size_t i = 0; i < s.dT_list.size(); ++i) o << (i ? ", " : "") << format_double(s.dT_list[i]);
    o << "\n";
  }
  o << "k = " << s.k << "\n"
    << "burn_in = " << format_double(s.burn_in) << "\n"
    << "alpha_min = " << format_double(s.alpha_min) << "\n"
    << "alpha_max = " << format_double(s.alpha_max) << "\n"
    << "lambda_min = " << format_double(s.lambda_min) << "\n"
    << "lambda_max = " << format_double(s.lambda_max) << "\n"
    << "nx = " << s.nx << "\n"
    << "ny = " << s.ny << "\n"
    << "n = " << s.n << "\n";
  if (!c.out.empty()) o << "\n[output]\ncsv = " << c.out << "\n";
  return o.str();
}

}  // namespace sse
