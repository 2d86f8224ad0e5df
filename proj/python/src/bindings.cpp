#include "pipeline.hpp"

#include "ogc/oracle.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ogc;

namespace {

// Returns (results_json, {file name: content}); config errors come back as the
// error document, not as an exception, so callers see the same object as the CLI.
py::tuple run(const std::string& command, const std::string& config, int threads, std::uint64_t seed) {
  app::json results;
  py::dict files;
  int code = 0;
  try {
    app::RunOutput out;
    {
      py::gil_scoped_release release;
      out = app::run_command(app::parse_config_text(config), app::RunOptions{command, threads, seed});
    }
    results = std::move(out.results);
    for (const auto& f : out.files) files[py::str(f.name)] = py::bytes(f.content);
  } catch (const Error& e) {
    results = app::error_document(command, e);
    code = app::exit_code(e);
  }
  return py::make_tuple(code, results.dump(), files);
}

py::list axis_orbits(const std::vector<double>& lambda, double energy, int samples) {
  const OscillatorReference ref = oscillator_reference(lambda, energy, samples);
  py::list out;
  for (const BrakeOrbit& o : ref.orbits) {
    py::dict d;
    d["brake_start"] = std::vector<double>(o.brake_start.data(), o.brake_start.data() + o.brake_start.size());
    d["brake_end"] = std::vector<double>(o.brake_end.data(), o.brake_end.data() + o.brake_end.size());
    d["half_period"] = o.half_period;
    d["jacobi_length"] = o.jacobi_length;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Orthogonal geodesic chords and brake orbits";
  m.def("commands", &app::command_names);
  m.def("run", &run, py::arg("command"), py::arg("config"), py::arg("threads") = 1, py::arg("seed") = 0);
  m.def("axis_orbits", &axis_orbits, py::arg("lam"), py::arg("energy"), py::arg("samples") = 2000);
  m.attr("config_schema") = app::kConfigSchema;
  m.attr("results_schema") = app::kResultsSchema;
}
