#include <optional>
#include <sstream>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sedlqr/block_matrix.h"
#include "sedlqr/dist_response.h"
#include "sedlqr/error.h"
#include "sedlqr/locality.h"
#include "sedlqr/lqr_core.h"
#include "sedlqr/pipelines.h"
#include "sedlqr/simulation.h"
#include "sedlqr/system_zoo.h"

namespace py = pybind11;
using namespace sedlqr;

namespace {

Space ParseSpace(const std::string& s) {
  if (s == "state") return Space::kState;
  if (s == "input") return Space::kInput;
  throw Error(ErrorKind::kInvalidInput, "space must be 'state' or 'input'");
}

std::optional<DareMethod> ParseMethod(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  if (*s == "value-iteration") return DareMethod::kValueIteration;
  if (*s == "doubling") return DareMethod::kDoubling;
  throw Error(ErrorKind::kInvalidInput, "method must be 'value-iteration' or 'doubling'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spatially decaying LQR toolkit";

  static py::exception<Error> exc(m, "SedlqrError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(exc)(e.what());
      inst.attr("kind") = std::string(e.name());
      PyErr_SetObject(exc.ptr(), inst.ptr());
    }
  });

  py::class_<Topology>(m, "Topology")
      .def_static("cycle", &Topology::Cycle, py::arg("n"), py::arg("state_dim") = 1,
                  py::arg("input_dim") = 1)
      .def_static("grid", &Topology::Grid, py::arg("rows"), py::arg("cols"),
                  py::arg("state_dim") = 1, py::arg("input_dim") = 1)
      .def_static(
          "from_edges",
          [](int n, const std::vector<std::pair<int, int>>& edges, std::vector<int> sd,
             std::vector<int> id) {
            std::vector<Edge> es;
            for (auto [i, j] : edges) es.push_back({i, j, 1.0});
            if (sd.empty()) sd.assign(n, 1);
            if (id.empty()) id.assign(n, 1);
            return Topology::FromEdgeList(n, es, sd, id);
          },
          py::arg("n"), py::arg("edges"), py::arg("state_dims") = std::vector<int>{},
          py::arg("input_dims") = std::vector<int>{})
      .def("distance", &Topology::distance)
      .def_property_readonly("agent_count", &Topology::agent_count)
      .def_property_readonly("diameter", &Topology::diameter)
      .def_property_readonly("connected", &Topology::connected)
      .def_property_readonly("n_x", &Topology::n_x)
      .def_property_readonly("n_u", &Topology::n_u)
      .def_property_readonly("state_dims", &Topology::state_dims)
      .def_property_readonly("input_dims", &Topology::input_dims);

  py::class_<LqrProblem>(m, "LqrProblem")
      .def(py::init<Topology, Eigen::MatrixXd, Eigen::MatrixXd, Eigen::MatrixXd,
                    Eigen::MatrixXd, Eigen::MatrixXd>(),
           py::arg("topology"), py::arg("A"), py::arg("B"), py::arg("Q"), py::arg("R"),
           py::arg("S"))
      .def_readonly("topology", &LqrProblem::topology)
      .def_readonly("A", &LqrProblem::A)
      .def_readonly("B", &LqrProblem::B)
      .def_readonly("Q", &LqrProblem::Q)
      .def_readonly("R", &LqrProblem::R)
      .def_readonly("S", &LqrProblem::S)
      .def_readonly("name", &LqrProblem::name)
      .def_readonly("params", &LqrProblem::params)
      .def_readonly("prestabilizer", &LqrProblem::prestabilizer)
      .def_readonly("parameter_out_of_range", &LqrProblem::parameter_out_of_range)
      .def("validate", &LqrProblem::Validate)
      .def("stable_form", [](const LqrProblem& p) { return StableForm(p); });

  m.def(
      "build_system",
      [](const std::string& name, std::optional<int> size, std::optional<double> rho,
         std::optional<double> eta, std::optional<double> alpha, std::optional<double> dt,
         std::uint64_t seed) {
        ExperimentSpec s;
        s.system = name;
        s.size = size;
        s.rho = rho;
        s.eta = eta;
        s.alpha = alpha;
        s.dt = dt;
        s.seed = seed;
        return BuildSystem(s);
      },
      py::arg("name"), py::arg("size") = py::none(), py::arg("rho") = py::none(),
      py::arg("eta") = py::none(), py::arg("alpha") = py::none(), py::arg("dt") = py::none(),
      py::arg("seed") = 0);
  m.def("builtin_systems", &BuiltinSystems);
  m.def("heat_equation_system", &HeatEquationSystem, py::arg("n"), py::arg("eta"),
        py::arg("b") = std::vector<double>{}, py::arg("q") = std::vector<double>{},
        py::arg("r") = std::vector<double>{});
  m.def("counterexample_system", &CounterexampleSystem, py::arg("n"), py::arg("a"));
  m.def("random_stable_sed_system", &RandomStableSedSystem, py::arg("seed"));
  m.def("matrix_exponential", &MatrixExponential, py::arg("a"), py::arg("t") = 1.0);

  py::class_<RiccatiSolution>(m, "RiccatiSolution")
      .def_readonly("P", &RiccatiSolution::P)
      .def_readonly("K", &RiccatiSolution::K)
      .def_readonly("residual", &RiccatiSolution::residual)
      .def_readonly("iterations", &RiccatiSolution::iterations)
      .def_property_readonly("method", [](const RiccatiSolution& s) {
        return std::string(DareMethodName(s.method));
      });
  m.def(
      "solve_dare",
      [](const LqrProblem& p, std::optional<std::string> method) {
        return SolveDare(p, ParseMethod(method));
      },
      py::arg("problem"), py::arg("method") = py::none());
  m.def("closed_loop_cost", &ClosedLoopCost, py::arg("problem"), py::arg("K"));
  m.def(
      "solve_lyapunov_g",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) { return SolveLyapunovG(a, q).G; },
      py::arg("a"), py::arg("q"));

  py::class_<StabilityCertificate>(m, "StabilityCertificate")
      .def_readonly("tau", &StabilityCertificate::tau)
      .def_readonly("rho", &StabilityCertificate::rho);
  m.def("fit_stability", &FitStability, py::arg("a"), py::arg("k_max") = 200);

  py::class_<SedCertificate>(m, "SedCertificate")
      .def_readonly("c", &SedCertificate::c)
      .def_readonly("gamma", &SedCertificate::gamma)
      .def_readonly("max_violation", &SedCertificate::max_violation)
      .def_readonly("support_limited", &SedCertificate::support_limited)
      .def_readonly("degenerate", &SedCertificate::degenerate);
  m.def(
      "fit_sed",
      [](const Eigen::MatrixXd& x, const Topology& t, const std::string& rows,
         const std::string& cols, const std::string& mode) {
        FitMode fm;
        if (mode == "envelope") {
          fm = FitMode::kEnvelope;
        } else if (mode == "regression") {
          fm = FitMode::kRegression;
        } else {
          throw Error(ErrorKind::kInvalidInput, "mode must be 'envelope' or 'regression'");
        }
        return FitSed(BlockMatrix(x, t, ParseSpace(rows), ParseSpace(cols)), t, fm);
      },
      py::arg("matrix"), py::arg("topology"), py::arg("rows") = "state",
      py::arg("cols") = "state", py::arg("mode") = "envelope");

  py::class_<DisturbanceSystem>(m, "DisturbanceSystem")
      .def_readonly("horizon", &DisturbanceSystem::horizon)
      .def_readonly("M", &DisturbanceSystem::M)
      .def_readonly("J", &DisturbanceSystem::J)
      .def_property_readonly("G", [](const DisturbanceSystem& d) { return d.G.G; })
      .def_readonly("lambda_min_bound", &DisturbanceSystem::lambda_min_bound)
      .def_readonly("lambda_max_bound", &DisturbanceSystem::lambda_max_bound);
  m.def(
      "assemble",
      [](const LqrProblem& p, int h) {
        return Assemble(p, SolveLyapunovG(p.A, p.Q), h, FitStability(p.A));
      },
      py::arg("problem"), py::arg("H"));
  m.def(
      "solve_direct", [](const DisturbanceSystem& d) { return SolveDirect(d).blocks; },
      py::arg("system"));
  m.def(
      "solve_neumann",
      [](const DisturbanceSystem& d, int t, bool exact) {
        return SolveNeumann(d, t, exact).blocks;
      },
      py::arg("system"), py::arg("t"), py::arg("exact_lambda") = false);
  m.def(
      "disturbance_cost",
      [](const DisturbanceSystem& d, const std::vector<Eigen::MatrixXd>& l) {
        return DisturbanceCost(d, DisturbanceController{l});
      },
      py::arg("system"), py::arg("L"));

  m.def("truncate", &Truncate, py::arg("K"), py::arg("topology"), py::arg("kappa"));
  m.def(
      "gap_sweep",
      [](const LqrProblem& p, const RiccatiSolution& s, int lo, int hi) {
        py::list rows;
        for (const TruncationReport& r : GapSweep(p, s, lo, hi)) {
          py::dict d;
          d["kappa"] = r.kappa;
          d["stable"] = r.stable;
          d["cost_trunc"] = r.cost_trunc;
          d["cost_opt"] = r.cost_opt;
          d["gap"] = r.gap;
          d["bound"] = r.theorem4_bound;
          d["threshold"] = r.kappa_threshold;
          rows.append(d);
        }
        return rows;
      },
      py::arg("problem"), py::arg("solution"), py::arg("kappa_min"), py::arg("kappa_max"));

  m.def(
      "rollout_state_feedback",
      [](const LqrProblem& p, const Eigen::MatrixXd& k, long horizon, int trials,
         std::uint64_t seed) {
        RolloutConfig c;
        c.horizon = horizon;
        c.trials = trials;
        c.seed = seed;
        const RolloutResult r = RolloutStateFeedback(p, k, c);
        return py::make_tuple(r.mean, r.stderr_);
      },
      py::arg("problem"), py::arg("K"), py::arg("horizon") = 200000, py::arg("trials") = 8,
      py::arg("seed") = 0);

  m.def(
      "run_pipeline",
      [](const std::string& pipeline, const std::string& system, const std::string& out,
         std::optional<int> h, std::optional<int> kappa_min, std::optional<int> kappa_max,
         std::optional<int> trials, std::optional<long> horizon, std::uint64_t seed) {
        ExperimentSpec s;
        s.pipeline = pipeline;
        s.system = system;
        s.out_dir = out;
        s.H = h;
        s.kappa_min = kappa_min;
        s.kappa_max = kappa_max;
        s.trials = trials;
        s.horizon = horizon;
        s.seed = seed;
        std::ostringstream log;
        const PipelineResult r = RunPipeline(s, log);
        return py::make_tuple(r.passed, r.files);
      },
      py::arg("pipeline"), py::arg("system"), py::arg("out_dir"), py::arg("H") = py::none(),
      py::arg("kappa_min") = py::none(), py::arg("kappa_max") = py::none(),
      py::arg("trials") = py::none(), py::arg("horizon") = py::none(), py::arg("seed") = 0);
}
