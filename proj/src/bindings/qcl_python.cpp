// Copyright 2026 The QCL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qcl/fields.hpp"
#include "qcl/harness.hpp"
#include "qcl/hessian.hpp"
#include "qcl/version.hpp"

namespace py = pybind11;
using namespace qcl;

namespace {

ControlProblem problem_by_label(const std::string& label, double t_final,
                                std::uint64_t f_seed) {
  ProblemOptions opts;
  opts.f_seed = f_seed;
  if (t_final > 0.0) opts.t_final = t_final;
  return make_problem(problem_label_from_string(label), opts);
}

}  // namespace

PYBIND11_MODULE(_native, m) {
  m.doc() = "Gradient-flow optimal control for closed N-level quantum "
            "systems";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "QclError");

  py::class_<ControlField>(m, "ControlField")
      .def(py::init([](double t_final, RMat values) {
             ControlField f;
             f.t_final = t_final;
             f.values = std::move(values);
             return f;
           }),
           py::arg("t_final"), py::arg("values"))
      .def_readwrite("t_final", &ControlField::t_final)
      .def_readwrite("values", &ControlField::values)
      .def_property_readonly("channels", &ControlField::channels)
      .def_property_readonly("slices", &ControlField::slices)
      .def_property_readonly("dt", &ControlField::dt);

  py::class_<QuantumSystem>(m, "QuantumSystem")
      .def_readonly("h0", &QuantumSystem::h0)
      .def_readonly("couplings", &QuantumSystem::couplings)
      .def_property_readonly("dim", &QuantumSystem::dim)
      .def_property_readonly("channels", &QuantumSystem::channels);

  py::class_<LandscapeBounds>(m, "LandscapeBounds")
      .def_readonly("j_min", &LandscapeBounds::j_min)
      .def_readonly("j_max", &LandscapeBounds::j_max)
      .def_readonly("eta", &LandscapeBounds::eta);

  py::class_<ControlProblem>(m, "ControlProblem")
      .def_property_readonly(
          "label", [](const ControlProblem& p) { return to_string(p.label); })
      .def_readonly("system", &ControlProblem::system)
      .def_readonly("t_final", &ControlProblem::t_final)
      .def_readonly("l_slices", &ControlProblem::l_slices)
      .def_readonly("trap_value", &ControlProblem::trap_value)
      .def_readonly("notes", &ControlProblem::notes)
      .def("zero_field", &ControlProblem::zero)
      .def("bounds",
           [](const ControlProblem& p) { return kinematic_bounds(p.objective); })
      .def("evaluate",
           [](const ControlProblem& p, const ControlField& f) {
             return evaluate(p.objective, final_propagator(p.system, f));
           },
           py::arg("field"))
      .def("final_propagator",
           [](const ControlProblem& p, const ControlField& f) {
             return final_propagator(p.system, f);
           },
           py::arg("field"))
      .def("gradient",
           [](const ControlProblem& p, const ControlField& f) {
             const PropagationRecord rec = propagate(p.system, f);
             return gradient(p.objective, p.system, rec, f.dt());
           },
           py::arg("field"));

  m.def("problem", &problem_by_label, py::arg("label"),
        py::arg("t_final") = -1.0, py::arg("f_seed") = 0,
        "Catalog problem by label A..G; t_final applies to G, f_seed to F");
  m.def("catalog_json", &catalog_json);

  m.def("initial_field", &initial_field_for, py::arg("problem"),
        py::arg("sigma0"), py::arg("seed"),
        "Random initial field for a run seed (sigma0=None for problem G)");
  m.def("rfs",
        [](const ControlField& f, const ControlProblem& p) {
          return rfs(f, p.system);
        },
        py::arg("field"), py::arg("problem"));
  m.def("mean_amplitude", &mean_amplitude, py::arg("field"));
  m.def("rescale_to_rfs",
        [](const ControlField& f, const ControlProblem& p, double target) {
          return rescale_to_rfs(f, p.system, target);
        },
        py::arg("field"), py::arg("problem"), py::arg("target"));

  py::class_<OptimizationResult>(m, "OptimizationResult")
      .def_property_readonly(
          "status",
          [](const OptimizationResult& r) { return to_string(r.status); })
      .def_readonly("iterations", &OptimizationResult::iterations)
      .def_readonly("rejected_steps", &OptimizationResult::rejected_steps)
      .def_readonly("j_trace", &OptimizationResult::j_trace)
      .def_readonly("final_field", &OptimizationResult::final_field)
      .def_readonly("sigma_opt", &OptimizationResult::sigma_opt)
      .def_readonly("j_initial", &OptimizationResult::j_initial)
      .def_readonly("j_final", &OptimizationResult::j_final)
      .def_readonly("max_unitarity_defect",
                    &OptimizationResult::max_unitarity_defect);

  m.def("optimize",
        [](const ControlProblem& p, const ControlField& f0, double tau,
           std::optional<double> eta, long max_iterations,
           double initial_step) {
          FlowOptions opts;
          opts.tau = tau;
          opts.eta_override = eta;
          opts.max_iterations = max_iterations;
          opts.initial_step = initial_step;
          return optimize(p, f0, opts);
        },
        py::arg("problem"), py::arg("field0"), py::arg("tau") = 1e-8,
        py::arg("eta") = std::nullopt, py::arg("max_iterations") = 100000,
        py::arg("initial_step") = 0.1);

  m.def("run_single",
        [](const std::string& label, std::optional<double> sigma0,
           std::uint64_t seed, double tau, long max_iterations,
           double t_final) {
          RunSpec spec;
          spec.problem = problem_label_from_string(label);
          spec.sigma0 = sigma0;
          spec.seed = seed;
          spec.opts.tau = tau;
          spec.opts.max_iterations = max_iterations;
          if (t_final > 0.0) spec.t_final = t_final;
          return run_single(spec).result;
        },
        py::arg("problem"), py::arg("sigma0"), py::arg("seed"),
        py::arg("tau") = 1e-8, py::arg("max_iterations") = 100000,
        py::arg("t_final") = -1.0);

  py::class_<HessianReport>(m, "HessianReport")
      .def_readonly("matrix", &HessianReport::matrix)
      .def_readonly("eigenvalues", &HessianReport::eigenvalues)
      .def_property_readonly(
          "classification",
          [](const HessianReport& r) { return to_string(r.classification); })
      .def_readonly("tolerance", &HessianReport::tolerance)
      .def_readonly("step", &HessianReport::step);

  m.def("hessian_at",
        [](const ControlProblem& p, const ControlField& f, double step,
           int workers, bool force) {
          return hessian_at(p, f, step, workers, force);
        },
        py::arg("problem"), py::arg("field"), py::arg("step") = 1e-4,
        py::arg("workers") = 1, py::arg("force") = false);
}
