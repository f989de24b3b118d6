// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_CREEP_MODEL_HPP
#define MORFORGE_CREEP_MODEL_HPP

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "morforge/fe.hpp"
#include "morforge/quad_rule.hpp"
#include "morforge/steady_model.hpp"

namespace morforge
{

enum class EndCondition
{
  kTraction,     // sigma(1) = end_value
  kDisplacement  // u(1) = end_value
};

//
// Quasi-static viscoelastic bar on (0, 1):
//   -sigma' + k u + c u^3 = f,  sigma = E (u' - gamma),  d gamma/dt = (u' - gamma) / tau,
// u(0) = 0 and a prescribed end load at x = 1, switched on at t > 0. The internal variable
// gamma lives at the Gauss points and is advanced by backward Euler, which is solved in
// closed form. mu = (E scale, tau scale).
//
struct CreepBarOptions
{
  double youngs_variation = 0.5;  // E(x) = mu_1 (1 + v sin(pi x))
  double tau_variation = 1.0;     // tau(x) = mu_2 (1 + v x)
  double foundation = 5.0;
  double foundation_cubic = 20.0;
  double body_force = 1.0;
  EndCondition end = EndCondition::kTraction;
  double end_value = 1.0;
  ParamBox box{{1.0, 0.2}, {10.0, 5.0}};
};

std::vector<double> UniformTimeGrid(double final_time, int n_steps);

// HF trajectory: states[0] is the initial (unloaded) state; gamma[k] holds the internal variable
// at every Gauss point (2 per element) after step k.
struct Trajectory
{
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<std::vector<double>> gamma;
  std::vector<int> newton_iterations;

  int NumSteps() const { return static_cast<int>(times.size()) - 1; }
  double Dt(int k) const { return times[k] - times[k - 1]; }
};

class CreepBarModel final : public FeDiscretization
{
public:
  explicit CreepBarModel(Mesh mesh, CreepBarOptions options = {});

  std::string Name() const { return "creep_bar"; }
  std::unique_ptr<CreepBarModel> OnMesh(const Mesh &mesh) const;
  const CreepBarOptions &Options() const { return options_; }

  double Youngs(double x, const ParamVec &mu) const;
  double RelaxationTime(double x, const ParamVec &mu) const;
  double GaussPoint(int k, int q) const;

  // Backward-Euler internal-variable update gamma^(k) = F(eps^(k), gamma^(k-1)).
  static double UpdateGamma(double strain, double gamma_prev, double dt, double tau);

  // Prescribed nodal value at time t (0 before the load is switched on).
  double ConstrainedValue(int node, double t) const;
  double Load(double t) const { return t > 0.0 ? options_.end_value : 0.0; }
  std::array<double, 2> Gather(int k, const Eigen::Ref<const Vector> &w, double t) const;

  // Local residual of element k for the step ending at time t with step dt.
  std::array<double, 2> ElementResidual(int k, const std::array<double, 2> &w_local,
                                        const double *gamma_prev, double dt,
                                        const ParamVec &mu) const;
  Mat2 ElementJacobian(int k, const std::array<double, 2> &w_local, const double *gamma_prev,
                       double dt, const ParamVec &mu) const;
  double FacetResidual(int j, double t) const;
  // Boundary facets carrying residual contributions.
  bool IsBoundaryFacet(int j) const { return j == 0 || j == NumFacets() - 1; }

  LocalResiduals EvaluateLocal(const Eigen::Ref<const Vector> &w,
                               const std::vector<double> &gamma_prev, double t, double dt,
                               const ParamVec &mu) const;
  Vector Residual(const Eigen::Ref<const Vector> &w, const std::vector<double> &gamma_prev,
                  double t, double dt, const ParamVec &mu, const QuadRule *weights = nullptr) const;
  SparseMatrix Jacobian(const Eigen::Ref<const Vector> &w, const std::vector<double> &gamma_prev,
                        double t, double dt, const ParamVec &mu,
                        const QuadRule *weights = nullptr) const;
  // Internal variable at every Gauss point after a step that reached state w.
  std::vector<double> AdvanceGamma(const Eigen::Ref<const Vector> &w,
                                   const std::vector<double> &gamma_prev, double t, double dt,
                                   const ParamVec &mu) const;

  // Quantity of interest: displacement at x = 1.
  double TipDisplacement(const Eigen::Ref<const Vector> &w, double t) const;

private:
  CreepBarOptions options_;
};

// Marches the HF problem over the time grid (times[0] = initial time) with damped Newton per
// step; SolverError carries the failing step index.
Trajectory SolveUnsteady(const CreepBarModel &model, const ParamVec &mu,
                         const std::vector<double> &time_grid, const NewtonSettings &settings = {});

}  // namespace morforge

#endif  // MORFORGE_CREEP_MODEL_HPP
