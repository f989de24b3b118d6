// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "morforge/cli.hpp"
#include "morforge/driver.hpp"
#include "morforge/persist.hpp"

namespace py = pybind11;
using namespace morforge;

namespace
{

ParamVec ToParam(const std::vector<double> &mu) { return ParamVec(mu); }

std::vector<ParamVec> ToParams(const std::vector<std::vector<double>> &mus)
{
  std::vector<ParamVec> out;
  out.reserve(mus.size());
  for (const auto &mu : mus)
  {
    out.emplace_back(mu);
  }
  return out;
}

py::dict TraceRow(const GreedyRecord &r)
{
  py::dict d;
  d["iter"] = r.iter;
  d["mu"] = r.mu.values();
  d["indicator_max"] = r.indicator_max;
  d["true_rel_err"] = r.true_rel_err;
  d["n"] = r.n;
  d["m"] = r.m;
  d["nnls_solves"] = r.nnls_solves;
  d["nnz_elem"] = r.nnz_elem;
  d["nnz_facet"] = r.nnz_facet;
  d["hf_newton_iterations"] = r.hf_newton_iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Reduced-order model training: POD, NNLS empirical quadrature, LSPG greedy.";

  static py::exception<Error> base(m, "Error");
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());

  m.def(
    "nnls_solve",
    [](const Matrix &g, const Vector &b, double delta, std::vector<int> warm_start)
    {
      const NnlsResult r = NnlsSolve(NnlsProblem{g, b, delta, std::move(warm_start)});
      py::dict d;
      d["rho"] = r.rho;
      d["active_set"] = r.active_set;
      d["ls_solve_count"] = r.ls_solve_count;
      d["residual_norm"] = r.residual_norm;
      d["converged_by_tolerance"] = r.converged_by_tolerance;
      return d;
    },
    py::arg("G"), py::arg("b"), py::arg("delta") = 1e-8,
    py::arg("warm_start") = std::vector<int>{});

  m.def(
    "pod",
    [](const Matrix &snapshots, std::optional<int> n, std::optional<double> tol)
    {
      if (n.has_value() == tol.has_value())
      {
        throw ArgumentError("pod: give exactly one of n or tol");
      }
      const PodTarget target = n ? PodTarget::Fixed(*n) : PodTarget::Tolerance(*tol);
      const PodBasis p =
        Pod(snapshots, target, InnerProduct::Euclidean(static_cast<int>(snapshots.rows())));
      return py::make_tuple(p.modes, p.eigenvalues);
    },
    py::arg("snapshots"), py::arg("n") = py::none(), py::arg("tol") = py::none());

  m.def(
    "strong_greedy",
    [](const Matrix &snapshots, int n, double tol)
    {
      return StrongGreedy(snapshots, n, tol,
                          InnerProduct::Euclidean(static_cast<int>(snapshots.rows())))
        .indices;
    },
    py::arg("snapshots"), py::arg("n"), py::arg("tol") = -1.0);

  py::class_<SteadyModel, std::shared_ptr<SteadyModel>>(m, "SteadyModel")
    .def_property_readonly("num_dofs", &SteadyModel::NumDofs)
    .def(
      "solve", [](const SteadyModel &model, const std::vector<double> &mu)
      { return SolveSteady(model, ToParam(mu)).u.values; },
      py::arg("mu"))
    .def(
      "residual", [](const SteadyModel &model, const Vector &w, const std::vector<double> &mu)
      { return model.Residual(w, ToParam(mu)); },
      py::arg("w"), py::arg("mu"))
    .def("nodes", [](const SteadyModel &model) { return model.GetMesh().Nodes(); });

  py::class_<ReactionDiffusionModel, SteadyModel, std::shared_ptr<ReactionDiffusionModel>>(
    m, "ReactionDiffusion")
    .def(py::init([](int n_elements)
                  { return std::make_shared<ReactionDiffusionModel>(Mesh::Uniform(n_elements)); }),
         py::arg("n_elements") = 100);

  py::class_<CreepBarModel, std::shared_ptr<CreepBarModel>>(m, "CreepBar")
    .def(py::init([](int n_elements)
                  { return std::make_shared<CreepBarModel>(Mesh::Uniform(n_elements)); }),
         py::arg("n_elements") = 100)
    .def_property_readonly("num_dofs", &CreepBarModel::NumDofs)
    .def(
      "solve",
      [](const CreepBarModel &model, const std::vector<double> &mu, double final_time, int steps)
      {
        const Trajectory t = SolveUnsteady(model, ToParam(mu), UniformTimeGrid(final_time, steps));
        Matrix states(model.NumDofs(), t.states.size());
        for (std::size_t k = 0; k < t.states.size(); k++)
        {
          states.col(k) = t.states[k];
        }
        return py::make_tuple(t.times, states);
      },
      py::arg("mu"), py::arg("final_time") = 5.0, py::arg("steps") = 20);

  py::class_<SteadyRom, std::shared_ptr<SteadyRom>>(m, "SteadyRom")
    .def_property_readonly("n", &SteadyRom::Size)
    .def_property_readonly("m", [](const SteadyRom &rom) { return rom.Test().Size(); })
    .def_property_readonly("basis", [](const SteadyRom &rom) { return rom.GetRob().basis; })
    .def_property_readonly("weights",
                           [](const SteadyRom &rom) { return rom.Quad().Concatenated(); })
    .def(
      "solve", [](const SteadyRom &rom, const std::vector<double> &mu)
      { return rom.Solve(ToParam(mu)).alpha; },
      py::arg("mu"))
    .def("reconstruct", [](const SteadyRom &rom, const Vector &alpha)
         { return Vector(rom.Reconstruct(alpha)); })
    .def(
      "error_indicator",
      [](const SteadyRom &rom, const std::vector<double> &mu)
      {
        const ParamVec p = ToParam(mu);
        return ErrorIndicator(rom.Model(), rom.Reconstruct(rom.Solve(p).alpha), p);
      },
      py::arg("mu"));

  m.def(
    "train_steady",
    [](std::shared_ptr<SteadyModel> model, std::vector<int> grid, double tol, double delta,
       const std::string &variant, int n_max)
    {
      GreedyConfig c;
      c.train = TrainGrid(model->Box(), {grid, std::vector<bool>(grid.size(), false)});
      c.tol = tol;
      c.delta = delta;
      c.variant = GreedyVariantFromString(variant);
      c.n_max = n_max;
      c.timing = false;
      SteadyGreedyResult r;
      {
        py::gil_scoped_release release;
        r = WeakGreedySteady(c, model);
      }
      py::list trace;
      for (const auto &rec : r.trace.records)
      {
        trace.append(TraceRow(rec));
      }
      return py::make_tuple(r.rom, trace);
    },
    py::arg("model"), py::arg("grid") = std::vector<int>{10, 10}, py::arg("tol") = 1e-3,
    py::arg("delta") = 1e-4, py::arg("variant") = "incr", py::arg("n_max") = 30);

  m.def(
    "evaluate_steady",
    [](const SteadyRom &rom, const std::vector<std::vector<double>> &params)
    {
      const RomEvaluation e = EvaluateSteadyRom(rom, ToParams(params));
      py::dict d;
      d["errors"] = e.errors;
      d["indicators"] = e.indicators;
      d["e_max"] = e.e_max;
      d["e_avg"] = e.e_avg;
      return d;
    },
    py::arg("rom"), py::arg("params"));

  m.def(
    "save_rom", [](const std::string &path, const SteadyRom &rom, std::uint64_t config_hash)
    { SaveRomBundle(path, rom, config_hash); },
    py::arg("path"), py::arg("rom"), py::arg("config_hash") = 0);
  m.def(
    "load_rom",
    [](const std::string &path)
    {
      RomBundle b = LoadRomBundle(path);
      if (!b.steady)
      {
        throw ArgumentError("load_rom: '" + path + "' holds an unsteady ROM");
      }
      return b.steady;
    },
    py::arg("path"));

  m.def(
    "run_cli",
    [](const std::vector<std::string> &args)
    {
      std::ostringstream out, err;
      const int code = RunCli(args, out, err);
      return py::make_tuple(code, out.str(), err.str());
    },
    py::arg("args"));
}
