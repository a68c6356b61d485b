#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nslwr/analysis.hpp"
#include "nslwr/conditions.hpp"
#include "nslwr/errors.hpp"
#include "nslwr/experiment.hpp"
#include "nslwr/oracle.hpp"

namespace py = pybind11;
using namespace nslwr;

namespace {

py::array_t<double> to_array(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n ? rows.front().size() : 0;
  py::array_t<double> out({n, m});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) view(i, j) = rows[i][j];
  }
  return out;
}

py::dict trajectory_dict(const Trajectory& t) {
  py::dict d;
  d["times"] = py::array_t<double>(t.times.size(), t.times.data());
  d["positions"] = to_array(t.positions);
  d["speeds"] = to_array(t.speeds);
  d["accelerations"] = to_array(t.accelerations);
  d["dn"] = t.dn();
  d["dt"] = t.dt();
  return d;
}

py::dict wave_dict(const WaveSolution& w) {
  py::dict d;
  d["k1"] = w.k1;
  d["k2"] = w.k2;
  if (const auto* s = std::get_if<Shock>(&w.kind)) {
    d["kind"] = "shock";
    d["speed"] = s->speed;
    d["degenerate"] = s->degenerate;
  } else if (const auto* r = std::get_if<Rarefaction>(&w.kind)) {
    d["kind"] = "rarefaction";
    d["lo"] = r->lo;
    d["hi"] = r->hi;
  } else {
    d["kind"] = "uniform";
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_nslwr, m) {
  m.doc() = "Lagrangian LWR platoon simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<MeasurementError>(m, "MeasurementError", PyExc_RuntimeError);
  py::register_exception<UnsupportedDiagram>(m, "UnsupportedDiagram", PyExc_ValueError);
  py::register_exception<ExperimentInvalid>(m, "ExperimentInvalid", PyExc_RuntimeError);

  py::class_<FundamentalDiagram>(m, "FundamentalDiagram")
      .def_static("greenshields", &FundamentalDiagram::greenshields, py::arg("V") = 20.0,
                  py::arg("K") = 1.0 / 7.0)
      .def_static("triangular", &FundamentalDiagram::triangular, py::arg("V") = 20.0,
                  py::arg("W") = 5.0, py::arg("K") = 1.0 / 7.0)
      .def_static(
          "kerner",
          [](double l, double T_rel, double K, double c1, double c2, double c3, double c4,
             bool clamp) {
            return FundamentalDiagram::kerner(Kerner{l, T_rel, K, c1, c2, c3, c4, clamp});
          },
          py::arg("l") = 28.0, py::arg("T_rel") = 5.0, py::arg("K") = 0.18,
          py::arg("c1") = 5.0461, py::arg("c2") = 0.25, py::arg("c3") = 0.06,
          py::arg("c4") = 3.73e-6, py::arg("clamp") = true)
      .def_property_readonly("type_name",
                             [](const FundamentalDiagram& f) { return std::string(f.type_name()); })
      .def_property_readonly("K", &FundamentalDiagram::jam_density)
      .def_property_readonly("S", &FundamentalDiagram::jam_spacing)
      .def_property_readonly("V", &FundamentalDiagram::free_flow_speed)
      .def("eta", &FundamentalDiagram::eta)
      .def("eta_prime", &FundamentalDiagram::eta_prime)
      .def("eta_second", &FundamentalDiagram::eta_second)
      .def("phi", &FundamentalDiagram::phi)
      .def("phi_prime", &FundamentalDiagram::phi_prime)
      .def("theta", &FundamentalDiagram::theta)
      .def("theta_prime", &FundamentalDiagram::theta_prime)
      .def("kinks", &FundamentalDiagram::kinks);

  m.def("collision_free_threshold", [](const FundamentalDiagram& f) {
    return collision_free_threshold(f);
  });
  m.def("cfl_threshold", [](const FundamentalDiagram& f) { return cfl_threshold(f); });
  m.def("check_concave", [](const FundamentalDiagram& f) { return check_concave(f); });
  m.def("validate_step_sizes", [](const FundamentalDiagram& f, double dn, double dt) {
    const StepSizeReport r = validate_step_sizes(f, dn, dt);
    py::dict d;
    d["collision_free_threshold"] = r.collision_free_threshold;
    d["cfl_threshold"] = r.cfl_threshold;
    d["collision_free_ok"] = r.collision_free_ok;
    d["cfl_ok"] = r.cfl_ok;
    d["concave"] = r.concave;
    return d;
  });

  m.def("shock_speed_rh", &shock_speed_rh);
  m.def("riemann_wave", [](const FundamentalDiagram& f, double k1, double k2) {
    return wave_dict(riemann_wave(f, k1, k2));
  });
  m.def("eulerian_dispersion_roots", [](const FundamentalDiagram& f, double k0, double T,
                                        double mode) {
    const auto r = eulerian_dispersion_roots(f, k0, T, mode);
    return std::make_pair(r[0], r[1]);
  });
  m.def("diffusion_coefficient", &diffusion_coefficient);

  m.def("template_names", &template_names);
  m.def("template_text", [](const std::string& name) { return std::string(template_text(name)); });
  m.def("normalize_config", [](const std::string& text) { return serialize(load_spec(text)); },
        "Parse a config and return its canonical text.");

  m.def(
      "run",
      [](const std::string& text) {
        const RunSpec spec = load_spec(text);
        const RunResult r = [&] {
          py::gil_scoped_release release;
          return execute(spec);
        }();
        py::dict d = trajectory_dict(r.trajectory);
        d["summary"] = summary_text(spec, r);
        d["collision_count"] = r.diagnostics.collision_events.size();
        d["negative_speed_count"] = r.diagnostics.negative_speed_events.size();
        d["min_spacing"] = r.diagnostics.min_spacing;
        d["max_abs_acceleration"] = r.diagnostics.max_abs_acceleration;
        if (r.wave) {
          d["measured_speed"] = r.wave->fitted_speed;
          d["r_squared"] = r.wave->r_squared;
        }
        return d;
      },
      py::arg("config"), "Simulate a config (text, or 'template = <name>').");

  m.def(
      "string_stability",
      [](const std::string& text) {
        const StringStabilitySetup setup = stability_setup(load_spec(text));
        StringStabilityResult r;
        {
          py::gil_scoped_release release;
          r = string_stability_experiment(setup);
        }
        py::dict d;
        d["omega"] = r.omega;
        d["amplification_ratio"] = r.amplification_ratio;
        d["predicted_ratio"] = r.predicted_ratio;
        d["per_vehicle_amplitude"] = r.per_vehicle_amplitude;
        return d;
      },
      py::arg("config"));
}
