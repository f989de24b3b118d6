// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_STEADY_MODEL_HPP
#define MORFORGE_STEADY_MODEL_HPP

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "morforge/fe.hpp"
#include "morforge/quad_rule.hpp"

namespace morforge
{

using Mat2 = std::array<std::array<double, 2>, 2>;

// Element-wise and facet-wise residual contributions of one state, before weighting.
// elem[k][a] = r^e_k(w, phi_a) for the two local nodes; facet[j] = r^f_j(w, phi_j).
struct LocalResiduals
{
  std::vector<std::array<double, 2>> elem;
  std::vector<double> facet;
};

//
// Steady HF model with decomposable residual
//   R(w, v) = sum_k r^e_k(w|D_k, v|D_k) + sum_j r^f_j(w|F~_j, v|F~_j).
// Concrete models supply the local kernels; assembly, weighting and the Jacobian live here.
//
class SteadyModel : public FeDiscretization
{
public:
  using FeDiscretization::FeDiscretization;

  virtual std::string Name() const = 0;
  virtual std::unique_ptr<SteadyModel> OnMesh(const Mesh &mesh) const = 0;

  virtual std::array<double, 2> ElementResidual(int k, const std::array<double, 2> &w_local,
                                                const ParamVec &mu) const = 0;
  virtual Mat2 ElementJacobian(int k, const std::array<double, 2> &w_local,
                               const ParamVec &mu) const = 0;
  virtual double FacetResidual(int /*j*/, double /*w_node*/, const ParamVec & /*mu*/) const
  {
    return 0.0;
  }
  virtual double FacetJacobian(int /*j*/, double /*w_node*/, const ParamVec & /*mu*/) const
  {
    return 0.0;
  }

  // Nodal values of element k (constrained nodes are homogeneous).
  std::array<double, 2> Gather(int k, const Eigen::Ref<const Vector> &w) const;
  double FacetValue(int j, const Eigen::Ref<const Vector> &w) const;

  LocalResiduals EvaluateLocal(const Eigen::Ref<const Vector> &w, const ParamVec &mu) const;

  // sum_k rho^e_k r^e_k + sum_j rho^f_j r^f_j against every free basis function; a null rule
  // means unit weights. Zero-weight entries are skipped.
  Vector Residual(const Eigen::Ref<const Vector> &w, const ParamVec &mu,
                  const QuadRule *weights = nullptr) const;
  SparseMatrix Jacobian(const Eigen::Ref<const Vector> &w, const ParamVec &mu,
                        const QuadRule *weights = nullptr) const;

  Vector ToNodal(const Eigen::Ref<const Vector> &w) const;
  Vector FromNodal(const Eigen::Ref<const Vector> &nodal) const;
};

//
// -(kappa u')' + c u^3 = f on (0, 1), u(0) = 0, kappa u'(1) = g, with mu = (kappa, c).
// The Neumann flux enters as the residual of the boundary facet at x = 1.
//
struct ReactionDiffusionOptions
{
  std::function<double(double)> source = nullptr;  // defaults to 10 sin(pi x)
  double neumann_flux = 1.0;
  ParamBox box{{0.5, 0.0}, {2.0, 10.0}};
};

class ReactionDiffusionModel final : public SteadyModel
{
public:
  explicit ReactionDiffusionModel(Mesh mesh, ReactionDiffusionOptions options = {});

  std::string Name() const override { return "reaction_diffusion"; }
  std::unique_ptr<SteadyModel> OnMesh(const Mesh &mesh) const override;

  std::array<double, 2> ElementResidual(int k, const std::array<double, 2> &w_local,
                                        const ParamVec &mu) const override;
  Mat2 ElementJacobian(int k, const std::array<double, 2> &w_local,
                       const ParamVec &mu) const override;
  double FacetResidual(int j, double w_node, const ParamVec &mu) const override;

  const ReactionDiffusionOptions &Options() const { return options_; }
  bool HasDefaultSource() const { return default_source_; }

private:
  ReactionDiffusionOptions options_;
  bool default_source_;
  // Source values at the Gauss points, cached per element.
  std::vector<std::array<double, 2>> source_at_gauss_;
};

struct NewtonSettings
{
  int max_iterations = 50;
  int max_halvings = 10;
  double rtol = 1e-10;
  double atol = 1e-12;
};

struct SteadySolve
{
  HfField u;
  int iterations = 0;
  double residual_norm = 0.0;
  double initial_residual_norm = 0.0;
};

// Damped Newton; converged when ||R(u)|| <= max(rtol ||R(init)||, atol). Throws SolverError
// with the last iterate on failure.
SteadySolve SolveSteady(const SteadyModel &model, const ParamVec &mu, const Vector *init = nullptr,
                        const NewtonSettings &settings = {});

// Field carried over from a coarser model by nodal interpolation.
HfField Prolongate(const HfField &field, const SteadyModel &from, const SteadyModel &to);

}  // namespace morforge

#endif  // MORFORGE_STEADY_MODEL_HPP
