// Python bindings: a thin JSON-string boundary over the task engine plus the
// filtered-complex primitives.  Structured data crosses as canonical JSON text
// so reports are byte-identical to the command-line tool's output.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>

#include "irrhodge/cliruntime.hpp"

namespace py = pybind11;
using namespace irrhodge;

namespace {

Json parse_or_plan_error(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw PlanError(std::string(what) + ": " + e.what());
  }
}

RunOptions make_options(uint64_t seed, int truncation, int jobs) {
  RunOptions opts;
  opts.seed = seed;
  opts.truncation = truncation;
  opts.jobs = jobs;
  return opts;
}

std::pair<std::string, bool> py_run_task(const std::string& kind, const std::string& params,
                                         uint64_t seed, int truncation) {
  Json p = parse_or_plan_error(params, "params");
  TaskResult r = run_task(kind, p, make_options(seed, truncation, 1));
  Json out;
  out["kind"] = kind;
  for (auto& [key, value] : r.report.items()) out[key] = value;
  out["ok"] = r.ok;
  return {out.dump(2) + "\n", r.ok};
}

std::pair<std::string, bool> py_run_plan(const std::string& plan, uint64_t seed, int truncation,
                                         int jobs) {
  Json p = parse_or_plan_error(plan, "plan");
  PlanResult r = run_plan(p, make_options(seed, truncation, jobs));
  return {r.report.dump(2) + "\n", r.ok};
}

std::string py_render(const std::string& report, const std::string& format) {
  return render_report(parse_or_plan_error(report, "report"), format);
}

std::string py_default_params(const std::string& kind) {
  return default_task_params(kind).dump(2) + "\n";
}

std::string py_random_filtered(uint64_t seed, int max_total_dim) {
  SplitMix64 rng(seed);
  FilteredComplex<Rat> fc = random_filtered_complex(rng, max_total_dim);
  return json_of_filtered(fc).dump(2) + "\n";
}

std::string py_triple(const std::string& complex_json) {
  Json j = parse_or_plan_error(complex_json, "complex");
  FilteredComplex<Rat> fc;
  try {
    fc = filtered_from_json(j);
  } catch (const std::exception& e) {
    throw PlanError(std::string("complex: ") + e.what());
  }
  return json_of_triple(triple_equivalence(fc)).dump(2) + "\n";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact verification toolkit for twisted logarithmic de Rham complexes";

  py::register_exception<PlanError>(m, "PlanError", PyExc_ValueError);

  m.def("task_kinds", [] { return task_kinds(); },
        "Names of the supported task kinds.");
  m.def("default_params", &py_default_params, py::arg("kind"),
        "Self-contained default parameters for a task kind, as JSON text.");
  m.def("run_task", &py_run_task, py::arg("kind"), py::arg("params"), py::arg("seed") = 1,
        py::arg("truncation") = -1,
        "Run one task; returns (report JSON text, ok).  Schema errors raise PlanError.");
  m.def("run_plan", &py_run_plan, py::arg("plan"), py::arg("seed") = 1,
        py::arg("truncation") = -1, py::arg("jobs") = 1,
        "Run a plan {\"tasks\": [...]}; returns (report JSON text, ok).  The report is "
        "byte-identical for equal plans, seeds, and truncations regardless of job count.");
  m.def("render", &py_render, py::arg("report"), py::arg("format") = "text",
        "Render a report (JSON text) as json, csv, or text.");
  m.def("random_filtered_complex", &py_random_filtered, py::arg("seed"),
        py::arg("max_total_dim") = 12,
        "Seeded random filtered complex over Q, as JSON text.");
  m.def("triple_equivalence", &py_triple, py::arg("complex_json"),
        "Evaluate the three degeneration criteria on a filtered complex (JSON text); "
        "returns the verdict as JSON text.");
}
