#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nessdmrg/dmrg.hpp"
#include "nessdmrg/exact.hpp"
#include "nessdmrg/experiment.hpp"

namespace py = pybind11;
using namespace nessdmrg;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Steady states of boundary-driven XXZ chains by DMRG on L^dagger L";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Ordering>(m, "Ordering").value("RLN", Ordering::RLN).value("RNLN", Ordering::RNLN);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_static("uniform", &ModelParams::uniform, py::arg("n"), py::arg("delta"), py::arg("gamma"),
                  py::arg("f1"), py::arg("fN"), py::arg("h") = 0.0)
      .def_readwrite("n_sites", &ModelParams::n_sites)
      .def_readwrite("j", &ModelParams::j)
      .def_readwrite("delta", &ModelParams::delta)
      .def_readwrite("h", &ModelParams::h)
      .def_readwrite("gamma1", &ModelParams::gamma1)
      .def_readwrite("gammaN", &ModelParams::gammaN)
      .def_readwrite("f1", &ModelParams::f1)
      .def_readwrite("fN", &ModelParams::fN)
      .def("validate", &ModelParams::validate);

  py::class_<SweepSchedule>(m, "SweepSchedule")
      .def(py::init<>())
      .def_readwrite("warmup_bond", &SweepSchedule::warmup_bond)
      .def_readwrite("warmup_max_sweeps", &SweepSchedule::warmup_max_sweeps)
      .def_readwrite("warmup_threshold", &SweepSchedule::warmup_threshold)
      .def_readwrite("bond_increment", &SweepSchedule::bond_increment)
      .def_readwrite("ramp_threshold", &SweepSchedule::ramp_threshold)
      .def_readwrite("max_bond", &SweepSchedule::max_bond)
      .def_readwrite("max_sweeps", &SweepSchedule::max_sweeps)
      .def_readwrite("svd_cutoff", &SweepSchedule::svd_cutoff)
      .def_readwrite("local_solver_iters", &SweepSchedule::local_solver_iters)
      .def_readwrite("energy_floor", &SweepSchedule::energy_floor)
      .def_readwrite("stop_threshold", &SweepSchedule::stop_threshold)
      .def_readwrite("converged_energy", &SweepSchedule::converged_energy)
      .def_readwrite("polish_sweeps", &SweepSchedule::polish_sweeps)
      .def_readwrite("polish_tolerance", &SweepSchedule::polish_tolerance)
      .def_readwrite("measure_every_sweep", &SweepSchedule::measure_every_sweep)
      .def("validate", &SweepSchedule::validate);

  py::class_<SweepRecord>(m, "SweepRecord")
      .def_readonly("sweep", &SweepRecord::sweep)
      .def_readonly("warmup", &SweepRecord::warmup)
      .def_readonly("bond_cap", &SweepRecord::bond_cap)
      .def_readonly("max_bond", &SweepRecord::max_bond)
      .def_readonly("energy", &SweepRecord::energy)
      .def_readonly("walltime_s", &SweepRecord::walltime_s)
      .def_readonly("mean_current", &SweepRecord::mean_current)
      .def_readonly("max_imag", &SweepRecord::max_imag);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("history", &RunResult::history)
      .def_readonly("warmup_sweeps", &RunResult::warmup_sweeps)
      .def_readonly("final_energy", &RunResult::final_energy)
      .def_readonly("current_profile", &RunResult::current_profile)
      .def_readonly("magnetization_profile", &RunResult::magnetization_profile)
      .def_readonly("imag_residual", &RunResult::imag_residual)
      .def_readonly("converged", &RunResult::converged)
      .def_readonly("reason", &RunResult::reason)
      .def_property_readonly("energy_history", &RunResult::energy_history)
      .def_property_readonly("bond_history", &RunResult::bond_history);

  m.def(
      "solve_ness",
      [](const ModelParams& p, Ordering o, const SweepSchedule& s) {
        py::gil_scoped_release release;
        return solve_ness(p, o, s);
      },
      py::arg("params"), py::arg("ordering") = Ordering::RLN, py::arg("schedule") = SweepSchedule{});

  py::class_<DenseNess>(m, "DenseNess")
      .def_readonly("rho", &DenseNess::rho)
      .def_readonly("residual", &DenseNess::residual)
      .def_readonly("spectrum", &DenseNess::spectrum)
      .def_readonly("gap", &DenseNess::gap)
      .def_readonly("multiplicity", &DenseNess::multiplicity);

  py::class_<DenseObservables>(m, "DenseObservables")
      .def_readonly("current", &DenseObservables::current)
      .def_readonly("magnetization", &DenseObservables::magnetization)
      .def_readonly("max_imag", &DenseObservables::max_imag);

  m.def("dense_ness", py::overload_cast<const ModelParams&>(&dense_ness), py::arg("params"));
  m.def("dense_ness_of", py::overload_cast<const Eigen::MatrixXcd&>(&dense_ness), py::arg("liouvillian"));
  m.def("dense_liouvillian", &dense_liouvillian, py::arg("params"));
  m.def("dense_observables", &dense_observables, py::arg("ness"), py::arg("params"));

  py::class_<TransportFit>(m, "TransportFit")
      .def_readonly("points", &TransportFit::points)
      .def_readonly("alpha", &TransportFit::alpha)
      .def_readonly("fit_residual", &TransportFit::fit_residual);
  m.def("fit_transport_exponent", &fit_transport_exponent, py::arg("points"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readwrite("model", &ExperimentConfig::model)
      .def_readwrite("scheme", &ExperimentConfig::scheme)
      .def_readwrite("schedule", &ExperimentConfig::schedule)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("output", &ExperimentConfig::output)
      .def_readwrite("workers", &ExperimentConfig::workers)
      .def_readwrite("allow_unconverged", &ExperimentConfig::allow_unconverged);
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("name", &RunRecord::name)
      .def_readonly("params", &RunRecord::params)
      .def_readonly("scheme", &RunRecord::scheme)
      .def_readonly("result", &RunRecord::result)
      .def("mean_current", &RunRecord::mean_current);

  py::class_<ExperimentOutcome>(m, "ExperimentOutcome")
      .def_readonly("runs", &ExperimentOutcome::runs)
      .def_readonly("fit", &ExperimentOutcome::fit)
      .def_readonly("all_converged", &ExperimentOutcome::all_converged)
      .def_readonly("exit_code", &ExperimentOutcome::exit_code);
  m.def(
      "run_experiment",
      [](const ExperimentConfig& c) {
        py::gil_scoped_release release;
        return run_experiment(c);
      },
      py::arg("config"));
}
