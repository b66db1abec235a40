#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <string>
#include <vector>

#include "levy/ecf.hpp"
#include "levy/errors.hpp"
#include "levy/estimator.hpp"
#include "levy/experiments.hpp"
#include "levy/io.hpp"
#include "levy/models.hpp"
#include "levy/selection.hpp"

namespace py = pybind11;
using levy::ModelSpec;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ModelSpec make_model(const std::string& kind, const std::map<std::string, double>& params) {
  return ModelSpec::from_named(kind, params);
}

std::vector<double> to_vector(const Array& a) {
  return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

template <class F>
py::array_t<levy::cplx> map_complex(const Array& u, F f) {
  py::array_t<levy::cplx> out(u.size());
  auto* o = out.mutable_data();
  for (py::ssize_t i = 0; i < u.size(); ++i) o[i] = f(u.data()[i]);
  return out;
}

levy::IncrementSample sample_of(const Array& z, double delta) {
  levy::IncrementSample s;
  s.values = to_vector(z);
  s.delta = delta;
  return s;
}

py::dict trace_dict(const levy::SelectionTrace& t) {
  std::vector<int> m;
  std::vector<double> contrast, penalty, objective;
  for (const auto& r : t.rows) {
    m.push_back(r.m);
    contrast.push_back(r.contrast);
    penalty.push_back(r.penalty);
    objective.push_back(r.objective);
  }
  py::dict d;
  d["m_hat"] = t.m_hat;
  d["m"] = m;
  d["contrast"] = to_array(contrast);
  d["penalty"] = to_array(penalty);
  d["objective"] = to_array(objective);
  d["ties"] = t.ties;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Levy density estimation from sampled increments";

  // Translators run newest first, so the base class goes in first.
  auto base = py::register_exception<levy::Error>(mod, "Error", PyExc_Exception);
  py::register_exception<levy::ParameterError>(mod, "ParameterError", base.ptr());
  py::register_exception<levy::GridCoverageError>(mod, "GridCoverageError", base.ptr());
  py::register_exception<levy::ParseError>(mod, "ParseError", base.ptr());
  py::register_exception<levy::IoError>(mod, "IoError", base.ptr());

  py::class_<ModelSpec>(mod, "Model")
      .def(py::init(&make_model), py::arg("kind"), py::arg("params"))
      .def_property_readonly("name", [](const ModelSpec& m) { return std::string(m.name()); })
      .def_property_readonly("params",
                             [](const ModelSpec& m) {
                               std::map<std::string, double> p;
                               for (const auto& [k, v] : m.named_params()) p[std::string(k)] = v;
                               return p;
                             })
      .def_property_readonly("is_subordinator", &ModelSpec::is_subordinator)
      .def("__repr__", [](const ModelSpec& m) { return "Model('" + std::string(m.name()) + "')"; });

  mod.def("model_names", [] {
    std::vector<std::string> out;
    for (auto n : levy::model_names()) out.emplace_back(n);
    return out;
  });

  mod.def(
      "simulate",
      [](const ModelSpec& spec, std::size_t n, double delta, std::uint64_t seed) {
        return to_array(levy::simulate_increments(spec, n, delta, seed).values);
      },
      py::arg("model"), py::arg("n"), py::arg("delta") = 1.0, py::arg("seed") = 0,
      "Increments Z_k = L_{k delta} - L_{(k-1) delta}, k = 1..n.");

  mod.def(
      "g_true",
      [](const ModelSpec& spec, const Array& x) {
        std::vector<double> out(x.size());
        for (py::ssize_t i = 0; i < x.size(); ++i) out[i] = levy::g_true(spec, x.data()[i]);
        return to_array(out);
      },
      py::arg("model"), py::arg("x"), "g(x) = x n(x).");
  mod.def(
      "g_star_true",
      [](const ModelSpec& spec, const Array& u) {
        return map_complex(u, [&](double v) { return levy::g_star_true(spec, v); });
      },
      py::arg("model"), py::arg("u"));
  mod.def(
      "psi_true",
      [](const ModelSpec& spec, double delta, const Array& u) {
        return map_complex(u, [&](double v) { return levy::psi_true(spec, delta, v); });
      },
      py::arg("model"), py::arg("delta"), py::arg("u"));
  mod.def("g_squared_norm", &levy::g_squared_norm, py::arg("model"));
  mod.def("tail_energy", &levy::tail_energy, py::arg("model"), py::arg("m"));

  mod.def(
      "estimate",
      [](const Array& z, double delta, int m, const Array& x, double kappa_psi) {
        const auto s = sample_of(z, delta);
        const auto table = levy::build_ecf_table(s, levy::FrequencyGrid::for_models(m), kappa_psi);
        const auto e = levy::spectral_g_hat(table, m, delta);
        return to_array(levy::reconstruct(e, to_vector(x)));
      },
      py::arg("z"), py::arg("delta"), py::arg("m"), py::arg("x"), py::arg("kappa_psi") = 1.0,
      "Projection estimate of g at a fixed model index m, evaluated at x.");

  mod.def(
      "select",
      [](const Array& z, double delta, const Array& x, double kappa_prime, double beta_hint,
         double kappa_psi, int m_max_cap) {
        const auto s = sample_of(z, delta);
        levy::PenaltyConfig pc;
        pc.kappa_prime = kappa_prime;
        pc.beta_hint = beta_hint;
        pc.kappa_psi = kappa_psi;
        pc.m_max_cap = m_max_cap;
        const int m_n = levy::build_collection(s.size(), delta, pc).back();
        const auto r = levy::select(s, pc, levy::FrequencyGrid::for_models(m_n));
        py::dict d = trace_dict(r.trace);
        d["g_hat"] = to_array(levy::reconstruct(r.estimate, to_vector(x)));
        d["beta_suggestion"] = r.beta_suggestion;
        return d;
      },
      py::arg("z"), py::arg("delta"), py::arg("x"), py::arg("kappa_prime") = 2.0,
      py::arg("beta_hint") = 0.0, py::arg("kappa_psi") = 1.0, py::arg("m_max_cap") = 64,
      "Adaptive choice of m; returns the selection trace and the selected estimate at x.");

  mod.def(
      "mise",
      [](const Array& z, double delta, int m, const ModelSpec& spec) {
        const auto s = sample_of(z, delta);
        const auto table = levy::build_ecf_table(s, levy::FrequencyGrid::for_models(m));
        return levy::mise_against_truth(levy::spectral_g_hat(table, m, delta), spec);
      },
      py::arg("z"), py::arg("delta"), py::arg("m"), py::arg("model"),
      "Integrated squared error of the estimate at m against the true g.");

  mod.def(
      "run_campaign",
      [](const ModelSpec& spec, std::vector<std::size_t> n_values, std::size_t replications,
         double delta, double kappa_prime, double beta_hint, std::uint64_t seed,
         std::size_t threads, std::optional<std::string> out_dir) {
        levy::ExperimentConfig c;
        c.spec = spec;
        c.n_values = std::move(n_values);
        c.replications = replications;
        c.delta = delta;
        c.penalty.kappa_prime = kappa_prime;
        c.penalty.beta_hint = beta_hint;
        c.root_seed = seed;
        c.threads = threads;
        c.validate();
        levy::CampaignResult r;
        {
          py::gil_scoped_release release;
          r = levy::run_campaign(c);
        }
        if (out_dir) levy::io::export_campaign(r, *out_dir, false);
        py::list aggs;
        for (const auto& a : r.aggregates) {
          py::dict d;
          d["n"] = a.n;
          d["mean_mise"] = a.mean_mise;
          d["sd_mise"] = a.sd_mise;
          d["se_mise"] = a.se_mise;
          d["mean_m_hat"] = a.mean_m_hat;
          d["mean_oracle_ratio"] = a.mean_oracle_ratio;
          d["share_ratio_within_4"] = a.share_ratio_within_4;
          aggs.append(d);
        }
        py::dict out;
        out["aggregates"] = aggs;
        out["slope"] = r.rate ? py::cast(r.rate->slope) : py::none();
        std::vector<int> m_hat;
        std::vector<double> mise;
        for (const auto& rep : r.replications) {
          m_hat.push_back(rep.m_hat);
          mise.push_back(rep.mise_selected);
        }
        out["m_hat"] = m_hat;
        out["mise"] = to_array(mise);
        return out;
      },
      py::arg("model"), py::arg("n_values"), py::arg("replications"), py::arg("delta") = 1.0,
      py::arg("kappa_prime") = 2.0, py::arg("beta_hint") = 0.0, py::arg("seed") = 20240607,
      py::arg("threads") = 1, py::arg("out_dir") = py::none(),
      "Monte Carlo risk campaign; returns per-n aggregates and per-replication results.");

  mod.def("fit_rate", [](const std::vector<double>& nd, const std::vector<double>& mise) {
    const auto f = levy::fit_rate(nd, mise);
    return py::make_tuple(f.slope, f.intercept);
  });
}
