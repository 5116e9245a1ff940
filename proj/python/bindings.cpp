#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sse/analysis.hpp>
#include <sse/config.hpp>
#include <sse/errors.hpp>
#include <sse/harness.hpp>
#include <sse/noise.hpp>
#include <sse/parareal.hpp>
#include <sse/propagators.hpp>
#include <sse/spectral.hpp>

namespace py = pybind11;
using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

namespace {

sse::SpectralField to_field(const CArray& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array of spectral coefficients");
  return sse::SpectralField(std::vector<sse::Complex>(a.data(), a.data() + a.size()));
}

CArray to_array(const sse::SpectralField& u) {
  CArray out(static_cast<py::ssize_t>(u.size()));
  std::copy(u.begin(), u.end(), out.mutable_data());
  return out;
}

CArray stack(const std::vector<sse::SpectralField>& us) {
  const py::ssize_t rows = static_cast<py::ssize_t>(us.size());
  const py::ssize_t cols = rows ? static_cast<py::ssize_t>(us[0].size()) : 0;
  CArray out({rows, cols});
  auto* p = out.mutable_data();
  for (const auto& u : us) p = std::copy(u.begin(), u.end(), p);
  return out;
}

sse::FineKind fine_kind(const std::string& s) {
  if (s == "exp_euler") return sse::FineKind::ExpEuler;
  if (s == "exact_linear") return sse::FineKind::ExactLinear;
  throw std::invalid_argument("fine must be 'exp_euler' or 'exact_linear'");
}

sse::ModelConfig make_model(double alpha, double theta, std::size_t modes, double lambda, const std::string& kind,
                            double q, double q_decay, std::vector<double> potential) {
  sse::ModelConfig c;
  c.alpha = alpha;
  c.theta = theta;
  c.modes = modes;
  if (kind == "linear")
    c.nonlinearity = sse::Linear{lambda};
  else if (kind == "saturated_cubic")
    c.nonlinearity = sse::SaturatedCubic{lambda};
  else if (kind == "potential")
    c.nonlinearity = sse::Potential{std::move(potential)};
  else
    throw std::invalid_argument("kind must be 'linear', 'potential' or 'saturated_cubic'");
  c.q = q_decay == 0.0 ? sse::QSpec::flat(modes, q) : sse::QSpec::poly_decay(modes, q, q_decay);
  c.validate();
  return c;
}

py::list stats_list(const std::vector<sse::GaussianStats>& st) {
  py::list out;
  for (const auto& s : st) out.append(py::make_tuple(s.mean, s.covariance, s.relation));
  return out;
}

std::vector<sse::GaussianStats> stats_from(const std::vector<std::tuple<sse::Complex, double, sse::Complex>>& in) {
  std::vector<sse::GaussianStats> out;
  for (const auto& [m, c, r] : in) out.push_back({m, c, r});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parareal exponential theta-scheme for the damped stochastic Schroedinger equation";

  py::register_exception<sse::ContractionViolation>(m, "ContractionViolation", PyExc_ValueError);
  py::register_exception<sse::NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);
  py::register_exception<sse::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<sse::Divergence>(m, "Divergence", PyExc_ArithmeticError);

  py::class_<sse::ModelConfig>(m, "Model")
      .def(py::init(&make_model), py::arg("alpha"), py::arg("theta"), py::arg("modes"), py::arg("lam") = 0.0,
           py::arg("kind") = "linear", py::arg("q") = 1.0, py::arg("q_decay") = 0.0,
           py::arg("potential") = std::vector<double>{},
           "Linear/saturated_cubic use lam; potential takes samples on 2*modes+1 (or more) interior points.")
      .def_readonly("alpha", &sse::ModelConfig::alpha)
      .def_readonly("theta", &sse::ModelConfig::theta)
      .def_readonly("modes", &sse::ModelConfig::modes)
      .def_property_readonly("lipschitz", [](const sse::ModelConfig& c) { return sse::lipschitz_bound(c); });

  py::class_<sse::TimeGrid>(m, "TimeGrid")
      .def(py::init([](double T, int N, int J) {
             sse::TimeGrid g{T, N, J};
             g.validate();
             return g;
           }),
           py::arg("T"), py::arg("N"), py::arg("J"))
      .def_readonly("T", &sse::TimeGrid::T)
      .def_readonly("N", &sse::TimeGrid::N)
      .def_readonly("J", &sse::TimeGrid::J)
      .def_property_readonly("dT", &sse::TimeGrid::coarse_step)
      .def_property_readonly("dt", &sse::TimeGrid::fine_step);

  py::class_<sse::NoisePath>(m, "NoisePath")
      .def_static("sample", &sse::NoisePath::sample, py::arg("grid"), py::arg("modes"), py::arg("seed"),
                  py::arg("threads") = 1)
      .def_property_readonly("seed", &sse::NoisePath::seed)
      .def("fine_increments",
           [](const sse::NoisePath& p, int n, int j) {
             const auto s = p.fine_increments(n, j);
             return to_array(sse::SpectralField(std::vector<sse::Complex>(s.begin(), s.end())));
           })
      .def("coarse_increments",
           [](const sse::NoisePath& p, int n) { return to_array(sse::SpectralField(p.coarse_increments(n))); });

  m.def("eigenvalue", &sse::eigenvalue, py::arg("m"), py::arg("alpha"));
  m.def(
      "semigroup_apply",
      [](const CArray& u, double t, double alpha) { return to_array(sse::semigroup_apply(to_field(u), t, alpha)); },
      py::arg("u"), py::arg("t"), py::arg("alpha"));
  m.def("h_norm", [](const CArray& u) { return sse::h_norm(to_field(u)); });
  m.def(
      "eval_nonlinearity", [](const CArray& u, const sse::ModelConfig& c) { return to_array(sse::eval_nonlinearity(to_field(u), c)); },
      py::arg("u"), py::arg("model"));

  m.def(
      "coarse_step",
      [](const CArray& u, int n, const sse::NoisePath& path, const sse::ModelConfig& c, const sse::TimeGrid& g) {
        return to_array(sse::ExpThetaCoarse(c, g).advance(to_field(u), n, path));
      },
      py::arg("u"), py::arg("n"), py::arg("path"), py::arg("model"), py::arg("grid"));
  m.def(
      "propagate_fine",
      [](const CArray& u, int n, const sse::NoisePath& path, const sse::ModelConfig& c, const sse::TimeGrid& g,
         const std::string& fine) { return to_array(sse::propagate_fine(to_field(u), n, path, c, g, fine_kind(fine))); },
      py::arg("u"), py::arg("n"), py::arg("path"), py::arg("model"), py::arg("grid"), py::arg("fine") = "exp_euler");

  m.def(
      "run_parareal",
      [](const CArray& u0, const sse::NoisePath& path, const sse::ModelConfig& c, const sse::TimeGrid& g, int k_max,
         const std::string& fine, unsigned threads) {
        sse::PararealConfig p;
        p.k_max = k_max;
        p.fine_kind = fine_kind(fine);
        p.threads = threads;
        sse::PararealHistory h;
        {
          py::gil_scoped_release release;
          h = sse::run_parareal(to_field(u0), path, c, g, p);
        }
        py::list iterates;
        for (const auto& it : h.iterates) iterates.append(stack(it));
        py::dict out;
        out["iterates"] = iterates;
        out["reference"] = stack(h.reference);
        out["errors"] = h.errors;
        out["k_used"] = h.k_used;
        return out;
      },
      py::arg("u0"), py::arg("path"), py::arg("model"), py::arg("grid"), py::arg("k_max"),
      py::arg("fine") = "exp_euler", py::arg("threads") = 1);

  m.def("eta", &sse::eta, py::arg("theta"), py::arg("lam"), py::arg("dT"));
  m.def("s_theta", &sse::s_theta, py::arg("theta"), py::arg("lam"), py::arg("dT"));
  m.def("stable_function", &sse::stable_function, py::arg("theta"), py::arg("lam"), py::arg("alpha"), py::arg("dT"));
  m.def(
      "uniform_contraction_check",
      [](double theta, double lam, double alpha, double dT) {
        const auto c = sse::uniform_contraction_check(theta, lam, alpha, dT);
        py::dict d;
        d["converges"] = c.converges;
        d["rate"] = c.rate;
        d["sufficient_alpha"] = c.sufficient_alpha;
        d["coupling"] = c.coupling;
        d["beta"] = c.beta;
        return d;
      },
      py::arg("theta"), py::arg("lam"), py::arg("alpha"), py::arg("dT"));
  m.def(
      "region_raster",
      [](double theta, double dT, double amin, double amax, double lmin, double lmax, int nx, int ny) {
        const auto r = sse::region_raster(theta, dT, amin, amax, lmin, lmax, nx, ny);
        py::array_t<double> tau({ny, nx});
        std::copy(r.stable_value.begin(), r.stable_value.end(), tau.mutable_data());
        return py::make_tuple(r.alphas, r.lambdas, tau);
      },
      py::arg("theta"), py::arg("dT"), py::arg("alpha_min"), py::arg("alpha_max"), py::arg("lambda_min"),
      py::arg("lambda_max"), py::arg("nx"), py::arg("ny"));
  m.def(
      "exact_moments",
      [](double t, const std::vector<std::tuple<sse::Complex, double, sse::Complex>>& init, const sse::ModelConfig& c) {
        return stats_list(sse::exact_moments(t, stats_from(init), c));
      },
      py::arg("t"), py::arg("initial"), py::arg("model"), "initial: one (mean, covariance, relation) per mode");
  m.def(
      "theta_scheme_moments",
      [](int n, const std::vector<std::tuple<sse::Complex, double, sse::Complex>>& init, const sse::ModelConfig& c,
         double dT) { return stats_list(sse::theta_scheme_moments(n, stats_from(init), c, dT)); },
      py::arg("n"), py::arg("initial"), py::arg("model"), py::arg("dT"));
  m.def(
      "nonlinear_factor",
      [](double theta, double L, double alpha, double dT) { return sse::nonlinear_factor(theta, L, alpha, dT).f; },
      py::arg("theta"), py::arg("lipschitz"), py::arg("alpha"), py::arg("dT"));
  m.def("mk_norm_bound", &sse::mk_norm_bound, py::arg("beta"), py::arg("n"), py::arg("k"));
  m.def("linear_error_bound", &sse::linear_error_bound, py::arg("theta"), py::arg("lam"), py::arg("alpha"),
        py::arg("dT"), py::arg("k"), py::arg("n"));
  m.def("delta_t_star", &sse::delta_t_star, py::arg("alpha"));

  m.def(
      "run_study",
      [](const std::string& config_text, std::optional<unsigned> threads) {
        auto cfg = sse::parse_config_text(config_text);
        if (threads) cfg.threads = *threads;
        py::gil_scoped_release release;
        return sse::run_study(cfg).csv;
      },
      py::arg("config_text"), py::arg("threads") = py::none(), "Run the study described by an .ini text; returns CSV.");
  m.def(
      "normalize_config", [](const std::string& text) { return sse::to_config_text(sse::parse_config_text(text)); },
      py::arg("config_text"));

#ifdef SSE_VERSION
  m.attr("__version__") = SSE_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
