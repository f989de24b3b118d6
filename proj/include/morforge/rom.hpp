// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_ROM_HPP
#define MORFORGE_ROM_HPP

#include <memory>
#include <vector>

#include "morforge/compress.hpp"
#include "morforge/creep_model.hpp"
#include "morforge/quad_rule.hpp"
#include "morforge/steady_model.hpp"

namespace morforge
{

struct GaussNewtonSettings
{
  int max_iterations = 50;
  int max_halvings = 10;
  double step_tol = 1e-10;
  double residual_tol = 1e-10;
  // Finite-difference reduced Jacobian instead of the analytic one.
  bool fd_jacobian = false;
};

struct LspgResult
{
  Vector alpha;
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> history;
};

//
// Hyper-reduced LSPG ROM: minimizes the EQ residual tested against an orthonormal empirical
// test space. Only the rows of Z and Psi touching active elements/facets are kept.
//
class SteadyRom
{
public:
  SteadyRom(std::shared_ptr<const SteadyModel> model, Rob rob, TestSpaceState test, QuadRule quad,
            GaussNewtonSettings settings = {});

  const SteadyModel &Model() const { return *model_; }
  std::shared_ptr<const SteadyModel> ModelPtr() const { return model_; }
  const Rob &GetRob() const { return rob_; }
  const TestSpaceState &Test() const { return test_; }
  const QuadRule &Quad() const { return quad_; }
  const GaussNewtonSettings &Settings() const { return settings_; }
  int Size() const { return rob_.Size(); }

  // Training coordinates used to pick the default initial guess (closest training parameter).
  void SetTrainingData(std::vector<ParamVec> mus, std::vector<Vector> alphas);
  const std::vector<ParamVec> &TrainingParams() const { return train_mu_; }
  const std::vector<Vector> &TrainingCoordinates() const { return train_alpha_; }
  Vector DefaultInit(const ParamVec &mu) const;

  // Reduced residual (length m) and, when requested, its Jacobian (m x n).
  Vector ReducedResidual(const Eigen::Ref<const Vector> &alpha, const ParamVec &mu,
                         Matrix *jacobian = nullptr) const;

  LspgResult Solve(const ParamVec &mu, const Vector *alpha_init = nullptr) const;
  Vector Reconstruct(const Eigen::Ref<const Vector> &alpha) const { return rob_.basis * alpha; }

private:
  std::shared_ptr<const SteadyModel> model_;
  Rob rob_;
  TestSpaceState test_;
  QuadRule quad_;
  GaussNewtonSettings settings_;
  std::vector<ParamVec> train_mu_;
  std::vector<Vector> train_alpha_;

  struct ActiveElement
  {
    int k;
    double rho;
    std::array<int, 2> dofs;
  };
  struct ActiveFacet
  {
    int j;
    double rho;
    int dof;
  };
  std::vector<ActiveElement> elems_;
  std::vector<ActiveFacet> facets_;
};

LspgResult LspgSolve(const SteadyRom &rom, const ParamVec &mu, const Vector *alpha_init = nullptr);

// Dual test norm of the full HF residual at u_rom.
double ErrorIndicator(const SteadyModel &model, const Eigen::Ref<const Vector> &u_rom,
                      const ParamVec &mu);

// Trial-space coordinates Z^T M u.
Vector ProjectCoordinates(const Rob &rob, const Eigen::Ref<const Vector> &u,
                          const InnerProduct &ip);

// Riesz representers of J[u] zeta_i for every mode i (columns).
Matrix JacobianTestSnapshots(const SteadyModel &model, const Rob &rob,
                             const Eigen::Ref<const Vector> &u, const ParamVec &mu);
// Riesz representer of (R(u + eps zeta) - R(u)) / eps.
Vector FdTestSnapshot(const SteadyModel &model, const Eigen::Ref<const Vector> &zeta,
                      const Eigen::Ref<const Vector> &u, const ParamVec &mu, double eps = 1e-6);

struct TrainingSnapshot
{
  ParamVec mu;
  Vector u;
};

// The 2n-1 new test snapshots after the n-th mode was appended: Jacobian route at the new
// snapshot for every mode, FD route in the new mode's direction at each earlier snapshot.
Matrix BuildTestSnapshots(const SteadyModel &model, const Rob &rob, const TrainingSnapshot &latest,
                          const std::vector<TrainingSnapshot> &prior, double eps = 1e-6);

// All n_train * n test snapshots via the Jacobian route.
Matrix BuildAllTestSnapshots(const SteadyModel &model, const Rob &rob,
                             const std::vector<TrainingSnapshot> &train);

struct ReducedTrajectory
{
  std::vector<double> times;
  std::vector<Vector> alphas;
  std::vector<double> qoi;
  std::vector<int> newton_iterations;
};

//
// Time-marching hyper-reduced Galerkin ROM for the creep bar. Internal variables live only at
// the Gauss points of elements with non-zero weight.
//
class UnsteadyRom
{
public:
  UnsteadyRom(std::shared_ptr<const CreepBarModel> model, Rob rob, QuadRule quad,
              std::vector<double> time_grid, NewtonSettings settings = {});

  const CreepBarModel &Model() const { return *model_; }
  std::shared_ptr<const CreepBarModel> ModelPtr() const { return model_; }
  const Rob &GetRob() const { return rob_; }
  const QuadRule &Quad() const { return quad_; }
  const std::vector<double> &TimeGrid() const { return times_; }
  const NewtonSettings &Settings() const { return settings_; }
  int Size() const { return rob_.Size(); }
  int NumTrackedGaussPoints() const { return 2 * static_cast<int>(elems_.size()); }

  // Reduced residual and Jacobian of one step with the active-element internal variables.
  Vector StepResidual(const Eigen::Ref<const Vector> &alpha, const std::vector<double> &gamma_prev,
                      double t, double dt, const ParamVec &mu, Matrix *jacobian = nullptr) const;

  ReducedTrajectory March(const ParamVec &mu) const;
  Vector Reconstruct(const Eigen::Ref<const Vector> &alpha) const { return rob_.basis * alpha; }

private:
  std::shared_ptr<const CreepBarModel> model_;
  Rob rob_;
  QuadRule quad_;
  std::vector<double> times_;
  NewtonSettings settings_;

  struct ActiveElement
  {
    int k;
    double rho;
    std::array<int, 2> nodes;
    std::array<int, 2> dofs;
  };
  std::vector<ActiveElement> elems_;
  struct ActiveFacet
  {
    int j;
    double rho;
    int dof;
  };
  std::vector<ActiveFacet> facets_;

  std::array<double, 2> Local(const ActiveElement &e, const Eigen::Ref<const Vector> &alpha,
                              double t) const;
};

ReducedTrajectory GalerkinMarch(const UnsteadyRom &rom, const ParamVec &mu);

// Internal variables at every Gauss point recomputed from a reduced trajectory (validation).
std::vector<std::vector<double>> ReplayInternalVariables(const UnsteadyRom &rom,
                                                         const ReducedTrajectory &traj,
                                                         const ParamVec &mu);

}  // namespace morforge

#endif  // MORFORGE_ROM_HPP
