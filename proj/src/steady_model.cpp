// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/steady_model.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SparseLU>

namespace morforge
{

std::array<double, 2> SteadyModel::Gather(int k, const Eigen::Ref<const Vector> &w) const
{
  const auto dofs = ElementDofs(k);
  return {dofs[0] >= 0 ? w[dofs[0]] : 0.0, dofs[1] >= 0 ? w[dofs[1]] : 0.0};
}

double SteadyModel::FacetValue(int j, const Eigen::Ref<const Vector> &w) const
{
  const int d = FacetDof(j);
  return d >= 0 ? w[d] : 0.0;
}

LocalResiduals SteadyModel::EvaluateLocal(const Eigen::Ref<const Vector> &w,
                                          const ParamVec &mu) const
{
  RequireSize(w, "local residual evaluation");
  LocalResiduals out;
  out.elem.resize(NumElements());
  out.facet.resize(NumFacets());
  for (int k = 0; k < NumElements(); k++)
  {
    out.elem[k] = ElementResidual(k, Gather(k, w), mu);
  }
  for (int j = 0; j < NumFacets(); j++)
  {
    out.facet[j] = FacetDof(j) >= 0 ? FacetResidual(j, FacetValue(j, w), mu) : 0.0;
  }
  return out;
}

Vector SteadyModel::Residual(const Eigen::Ref<const Vector> &w, const ParamVec &mu,
                             const QuadRule *weights) const
{
  RequireSize(w, "residual");
  RequireRule(weights, "residual");
  Vector r = Vector::Zero(NumDofs());
  for (int k = 0; k < NumElements(); k++)
  {
    const double rho = weights ? weights->elem_weights[k] : 1.0;
    if (rho == 0.0)
    {
      continue;
    }
    const auto local = ElementResidual(k, Gather(k, w), mu);
    const auto dofs = ElementDofs(k);
    for (int a = 0; a < 2; a++)
    {
      if (dofs[a] >= 0)
      {
        r[dofs[a]] += rho * local[a];
      }
    }
  }
  for (int j = 0; j < NumFacets(); j++)
  {
    const double rho = weights ? weights->facet_weights[j] : 1.0;
    const int d = FacetDof(j);
    if (rho == 0.0 || d < 0)
    {
      continue;
    }
    r[d] += rho * FacetResidual(j, w[d], mu);
  }
  return r;
}

SparseMatrix SteadyModel::Jacobian(const Eigen::Ref<const Vector> &w, const ParamVec &mu,
                                   const QuadRule *weights) const
{
  RequireSize(w, "jacobian");
  RequireRule(weights, "jacobian");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * NumElements() + NumFacets());
  for (int k = 0; k < NumElements(); k++)
  {
    const double rho = weights ? weights->elem_weights[k] : 1.0;
    if (rho == 0.0)
    {
      continue;
    }
    const Mat2 jac = ElementJacobian(k, Gather(k, w), mu);
    const auto dofs = ElementDofs(k);
    for (int a = 0; a < 2; a++)
    {
      for (int b = 0; b < 2; b++)
      {
        if (dofs[a] >= 0 && dofs[b] >= 0)
        {
          triplets.emplace_back(dofs[a], dofs[b], rho * jac[a][b]);
        }
      }
    }
  }
  for (int j = 0; j < NumFacets(); j++)
  {
    const double rho = weights ? weights->facet_weights[j] : 1.0;
    const int d = FacetDof(j);
    if (rho != 0.0 && d >= 0)
    {
      triplets.emplace_back(d, d, rho * FacetJacobian(j, w[d], mu));
    }
  }
  SparseMatrix jac(NumDofs(), NumDofs());
  jac.setFromTriplets(triplets.begin(), triplets.end());
  return jac;
}

Vector SteadyModel::ToNodal(const Eigen::Ref<const Vector> &w) const
{
  RequireSize(w, "to nodal");
  Vector nodal = Vector::Zero(Dofs().NumNodes());
  for (int d = 0; d < NumDofs(); d++)
  {
    nodal[Dofs().Node(d)] = w[d];
  }
  return nodal;
}

Vector SteadyModel::FromNodal(const Eigen::Ref<const Vector> &nodal) const
{
  if (nodal.size() != Dofs().NumNodes())
  {
    throw DimensionError("from nodal: wrong number of nodal values");
  }
  Vector w(NumDofs());
  for (int d = 0; d < NumDofs(); d++)
  {
    w[d] = nodal[Dofs().Node(d)];
  }
  return w;
}

ReactionDiffusionModel::ReactionDiffusionModel(Mesh mesh, ReactionDiffusionOptions options)
  : SteadyModel(std::move(mesh), {0}, options.box), options_(std::move(options)),
    default_source_(!options_.source)
{
  if (!options_.source)
  {
    options_.source = [](double x) { return 10.0 * std::sin(std::numbers::pi * x); };
  }
  source_at_gauss_.resize(NumElements());
  const auto &x = GetMesh().Nodes();
  for (int k = 0; k < NumElements(); k++)
  {
    for (int q = 0; q < GaussRule::kPoints; q++)
    {
      const double xq = x[k] + GaussRule::points[q] * (x[k + 1] - x[k]);
      source_at_gauss_[k][q] = options_.source(xq);
    }
  }
}

std::unique_ptr<SteadyModel> ReactionDiffusionModel::OnMesh(const Mesh &mesh) const
{
  return std::make_unique<ReactionDiffusionModel>(mesh, options_);
}

std::array<double, 2> ReactionDiffusionModel::ElementResidual(int k,
                                                              const std::array<double, 2> &w,
                                                              const ParamVec &mu) const
{
  const double h = GetMesh().ElementLength(k);
  const double kappa = mu[0];
  const double cubic = mu[1];
  const double slope = (w[1] - w[0]) / h;
  std::array<double, 2> r{};
  // Diffusion: kappa w' phi_a' integrated exactly.
  r[0] = -kappa * slope;
  r[1] = kappa * slope;
  for (int q = 0; q < GaussRule::kPoints; q++)
  {
    const double s = GaussRule::points[q];
    const double jw = GaussRule::weights[q] * h;
    const double phi[2] = {1.0 - s, s};
    const double wq = phi[0] * w[0] + phi[1] * w[1];
    const double pointwise = cubic * wq * wq * wq - source_at_gauss_[k][q];
    r[0] += jw * pointwise * phi[0];
    r[1] += jw * pointwise * phi[1];
  }
  return r;
}

Mat2 ReactionDiffusionModel::ElementJacobian(int k, const std::array<double, 2> &w,
                                             const ParamVec &mu) const
{
  const double h = GetMesh().ElementLength(k);
  const double kappa = mu[0];
  const double cubic = mu[1];
  Mat2 jac{{{kappa / h, -kappa / h}, {-kappa / h, kappa / h}}};
  for (int q = 0; q < GaussRule::kPoints; q++)
  {
    const double s = GaussRule::points[q];
    const double jw = GaussRule::weights[q] * h;
    const double phi[2] = {1.0 - s, s};
    const double wq = phi[0] * w[0] + phi[1] * w[1];
    const double d = 3.0 * cubic * wq * wq * jw;
    for (int a = 0; a < 2; a++)
    {
      for (int b = 0; b < 2; b++)
      {
        jac[a][b] += d * phi[a] * phi[b];
      }
    }
  }
  return jac;
}

double ReactionDiffusionModel::FacetResidual(int j, double, const ParamVec &) const
{
  return j == NumFacets() - 1 ? -options_.neumann_flux : 0.0;
}

SteadySolve SolveSteady(const SteadyModel &model, const ParamVec &mu, const Vector *init,
                        const NewtonSettings &settings)
{
  model.Box().Require(mu);
  Vector u = init ? *init : Vector::Zero(model.NumDofs());
  model.RequireSize(u, "steady solve initial guess");

  Vector r = model.Residual(u, mu);
  double rnorm = r.norm();
  SteadySolve out;
  out.initial_residual_norm = rnorm;
  const double target = std::max(settings.rtol * rnorm, settings.atol);

  Eigen::SparseLU<SparseMatrix> lu;
  int it = 0;
  while (rnorm > target)
  {
    if (it == settings.max_iterations)
    {
      throw SolverError("steady Newton did not converge in " +
                            std::to_string(settings.max_iterations) + " iterations",
                        u, rnorm);
    }
    const SparseMatrix jac = model.Jacobian(u, mu);
    lu.compute(jac);
    if (lu.info() != Eigen::Success)
    {
      throw SolverError("steady Newton: singular Jacobian", u, rnorm);
    }
    const Vector du = lu.solve(-r);
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= settings.max_halvings; h++, step *= 0.5)
    {
      const Vector trial = u + step * du;
      Vector rt = model.Residual(trial, mu);
      const double tn = rt.norm();
      if (std::isfinite(tn) && tn < rnorm)
      {
        u = trial;
        r = std::move(rt);
        rnorm = tn;
        accepted = true;
        break;
      }
    }
    it++;
    if (!accepted)
    {
      throw SolverError("steady Newton: line search failed to reduce the residual", u, rnorm);
    }
  }
  out.u = HfField{std::move(u), model.MeshLevel()};
  out.iterations = it;
  out.residual_norm = rnorm;
  return out;
}

HfField Prolongate(const HfField &field, const SteadyModel &from, const SteadyModel &to)
{
  if (field.mesh_level != from.MeshLevel())
  {
    throw DimensionError("prolongate: field mesh level does not match the source model");
  }
  const Vector nodal = from.ToNodal(field.values);
  const Vector fine = Prolongate(std::span<const double>(nodal.data(), nodal.size()),
                                 from.GetMesh(), to.GetMesh());
  return HfField{to.FromNodal(fine), to.MeshLevel()};
}

}  // namespace morforge
