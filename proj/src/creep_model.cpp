// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/creep_model.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SparseLU>

namespace morforge
{

std::vector<double> UniformTimeGrid(double final_time, int n_steps)
{
  if (!(final_time > 0.0) || n_steps < 1)
  {
    throw ArgumentError("time grid needs a positive final time and at least one step");
  }
  std::vector<double> t(n_steps + 1);
  for (int k = 0; k <= n_steps; k++)
  {
    t[k] = final_time * static_cast<double>(k) / n_steps;
  }
  return t;
}

namespace
{

std::vector<int> ConstrainedNodes(const Mesh &mesh, const CreepBarOptions &options)
{
  std::vector<int> nodes{0};
  if (options.end == EndCondition::kDisplacement)
  {
    nodes.push_back(mesh.NumNodes() - 1);
  }
  return nodes;
}

void RequireGamma(const CreepBarModel &model, const std::vector<double> &gamma, const char *what)
{
  if (static_cast<int>(gamma.size()) != GaussRule::kPoints * model.NumElements())
  {
    throw DimensionError(std::string(what) + ": internal variables sized for a different mesh");
  }
}

}  // namespace

CreepBarModel::CreepBarModel(Mesh mesh, CreepBarOptions options)
  : FeDiscretization(mesh, ConstrainedNodes(mesh, options), options.box),
    options_(std::move(options))
{
}

std::unique_ptr<CreepBarModel> CreepBarModel::OnMesh(const Mesh &mesh) const
{
  return std::make_unique<CreepBarModel>(mesh, options_);
}

double CreepBarModel::Youngs(double x, const ParamVec &mu) const
{
  return mu[0] * (1.0 + options_.youngs_variation * std::sin(std::numbers::pi * x));
}

double CreepBarModel::RelaxationTime(double x, const ParamVec &mu) const
{
  return mu[1] * (1.0 + options_.tau_variation * x);
}

double CreepBarModel::GaussPoint(int k, int q) const
{
  const auto &x = GetMesh().Nodes();
  return x[k] + GaussRule::points[q] * (x[k + 1] - x[k]);
}

double CreepBarModel::UpdateGamma(double strain, double gamma_prev, double dt, double tau)
{
  if (!std::isfinite(tau))
  {
    return gamma_prev;
  }
  const double theta = dt / tau;
  return (gamma_prev + theta * strain) / (1.0 + theta);
}

double CreepBarModel::ConstrainedValue(int node, double t) const
{
  if (options_.end == EndCondition::kDisplacement && node == GetMesh().NumNodes() - 1)
  {
    return Load(t);
  }
  return 0.0;
}

std::array<double, 2> CreepBarModel::Gather(int k, const Eigen::Ref<const Vector> &w,
                                            double t) const
{
  const auto nodes = GetMesh().Element(k);
  std::array<double, 2> out{};
  for (int a = 0; a < 2; a++)
  {
    const int d = Dofs().Dof(nodes[a]);
    out[a] = d >= 0 ? w[d] : ConstrainedValue(nodes[a], t);
  }
  return out;
}

std::array<double, 2> CreepBarModel::ElementResidual(int k, const std::array<double, 2> &w,
                                                     const double *gamma_prev, double dt,
                                                     const ParamVec &mu) const
{
  const double h = GetMesh().ElementLength(k);
  const double strain = (w[1] - w[0]) / h;
  std::array<double, 2> r{};
  for (int q = 0; q < GaussRule::kPoints; q++)
  {
    const double s = GaussRule::points[q];
    const double xq = GaussPoint(k, q);
    const double jw = GaussRule::weights[q] * h;
    const double gamma = UpdateGamma(strain, gamma_prev[q], dt, RelaxationTime(xq, mu));
    const double sigma = Youngs(xq, mu) * (strain - gamma);
    const double phi[2] = {1.0 - s, s};
    const double uq = phi[0] * w[0] + phi[1] * w[1];
    const double reaction =
      options_.foundation * uq + options_.foundation_cubic * uq * uq * uq - options_.body_force;
    r[0] += jw * (-sigma / h + reaction * phi[0]);
    r[1] += jw * (sigma / h + reaction * phi[1]);
  }
  return r;
}

Mat2 CreepBarModel::ElementJacobian(int k, const std::array<double, 2> &w,
                                    const double * /*gamma_prev*/, double dt,
                                    const ParamVec &mu) const
{
  const double h = GetMesh().ElementLength(k);
  Mat2 jac{};
  for (int q = 0; q < GaussRule::kPoints; q++)
  {
    const double s = GaussRule::points[q];
    const double xq = GaussPoint(k, q);
    const double jw = GaussRule::weights[q] * h;
    const double tau = RelaxationTime(xq, mu);
    const double theta = std::isfinite(tau) ? dt / tau : 0.0;
    const double tangent = Youngs(xq, mu) / (1.0 + theta);
    const double dphi[2] = {-1.0 / h, 1.0 / h};
    const double phi[2] = {1.0 - s, s};
    const double uq = phi[0] * w[0] + phi[1] * w[1];
    const double dreaction = options_.foundation + 3.0 * options_.foundation_cubic * uq * uq;
    for (int a = 0; a < 2; a++)
    {
      for (int b = 0; b < 2; b++)
      {
        jac[a][b] += jw * (tangent * dphi[a] * dphi[b] + dreaction * phi[a] * phi[b]);
      }
    }
  }
  return jac;
}

double CreepBarModel::FacetResidual(int j, double t) const
{
  if (options_.end == EndCondition::kTraction && j == NumFacets() - 1)
  {
    return -Load(t);
  }
  return 0.0;
}

LocalResiduals CreepBarModel::EvaluateLocal(const Eigen::Ref<const Vector> &w,
                                            const std::vector<double> &gamma_prev, double t,
                                            double dt, const ParamVec &mu) const
{
  RequireSize(w, "local residual evaluation");
  RequireGamma(*this, gamma_prev, "local residual evaluation");
  LocalResiduals out;
  out.elem.resize(NumElements());
  out.facet.assign(NumFacets(), 0.0);
  for (int k = 0; k < NumElements(); k++)
  {
    out.elem[k] = ElementResidual(k, Gather(k, w, t), &gamma_prev[2 * k], dt, mu);
  }
  for (int j = 0; j < NumFacets(); j++)
  {
    if (FacetDof(j) >= 0)
    {
      out.facet[j] = FacetResidual(j, t);
    }
  }
  return out;
}

Vector CreepBarModel::Residual(const Eigen::Ref<const Vector> &w,
                               const std::vector<double> &gamma_prev, double t, double dt,
                               const ParamVec &mu, const QuadRule *weights) const
{
  RequireSize(w, "residual");
  RequireRule(weights, "residual");
  RequireGamma(*this, gamma_prev, "residual");
  Vector r = Vector::Zero(NumDofs());
  for (int k = 0; k < NumElements(); k++)
  {
    const double rho = weights ? weights->elem_weights[k] : 1.0;
    if (rho == 0.0)
    {
      continue;
    }
    const auto local = ElementResidual(k, Gather(k, w, t), &gamma_prev[2 * k], dt, mu);
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
    if (rho != 0.0 && d >= 0)
    {
      r[d] += rho * FacetResidual(j, t);
    }
  }
  return r;
}

SparseMatrix CreepBarModel::Jacobian(const Eigen::Ref<const Vector> &w,
                                     const std::vector<double> &gamma_prev, double t, double dt,
                                     const ParamVec &mu, const QuadRule *weights) const
{
  RequireSize(w, "jacobian");
  RequireRule(weights, "jacobian");
  RequireGamma(*this, gamma_prev, "jacobian");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * NumElements());
  for (int k = 0; k < NumElements(); k++)
  {
    const double rho = weights ? weights->elem_weights[k] : 1.0;
    if (rho == 0.0)
    {
      continue;
    }
    const Mat2 jac = ElementJacobian(k, Gather(k, w, t), &gamma_prev[2 * k], dt, mu);
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
  SparseMatrix jac(NumDofs(), NumDofs());
  jac.setFromTriplets(triplets.begin(), triplets.end());
  return jac;
}

std::vector<double> CreepBarModel::AdvanceGamma(const Eigen::Ref<const Vector> &w,
                                                const std::vector<double> &gamma_prev, double t,
                                                double dt, const ParamVec &mu) const
{
  RequireSize(w, "internal variable update");
  RequireGamma(*this, gamma_prev, "internal variable update");
  std::vector<double> gamma(gamma_prev.size());
  for (int k = 0; k < NumElements(); k++)
  {
    const auto wl = Gather(k, w, t);
    const double strain = (wl[1] - wl[0]) / GetMesh().ElementLength(k);
    for (int q = 0; q < GaussRule::kPoints; q++)
    {
      gamma[2 * k + q] = UpdateGamma(strain, gamma_prev[2 * k + q], dt,
                                     RelaxationTime(GaussPoint(k, q), mu));
    }
  }
  return gamma;
}

double CreepBarModel::TipDisplacement(const Eigen::Ref<const Vector> &w, double t) const
{
  const int last = GetMesh().NumNodes() - 1;
  const int d = Dofs().Dof(last);
  return d >= 0 ? w[d] : ConstrainedValue(last, t);
}

Trajectory SolveUnsteady(const CreepBarModel &model, const ParamVec &mu,
                         const std::vector<double> &time_grid, const NewtonSettings &settings)
{
  model.Box().Require(mu);
  if (time_grid.size() < 2)
  {
    throw ArgumentError("unsteady solve: time grid needs at least two instants");
  }
  for (std::size_t k = 1; k < time_grid.size(); k++)
  {
    if (!(time_grid[k] > time_grid[k - 1]))
    {
      throw ArgumentError("unsteady solve: time grid must be strictly increasing");
    }
  }
  Trajectory traj;
  traj.times = time_grid;
  traj.states.push_back(Vector::Zero(model.NumDofs()));
  traj.gamma.emplace_back(2 * model.NumElements(), 0.0);
  traj.newton_iterations.push_back(0);

  Eigen::SparseLU<SparseMatrix> lu;
  for (std::size_t k = 1; k < time_grid.size(); k++)
  {
    const double t = time_grid[k];
    const double dt = t - time_grid[k - 1];
    const auto &gamma_prev = traj.gamma.back();
    Vector u = traj.states.back();
    Vector r = model.Residual(u, gamma_prev, t, dt, mu);
    double rnorm = r.norm();
    const double target = std::max(settings.rtol * rnorm, settings.atol);
    int it = 0;
    while (rnorm > target)
    {
      if (it == settings.max_iterations)
      {
        throw SolverError("unsteady Newton did not converge at step " + std::to_string(k), u,
                          rnorm, static_cast<int>(k));
      }
      lu.compute(model.Jacobian(u, gamma_prev, t, dt, mu));
      if (lu.info() != Eigen::Success)
      {
        throw SolverError("unsteady Newton: singular Jacobian at step " + std::to_string(k), u,
                          rnorm, static_cast<int>(k));
      }
      const Vector du = lu.solve(-r);
      double step = 1.0;
      bool accepted = false;
      for (int h = 0; h <= settings.max_halvings; h++, step *= 0.5)
      {
        const Vector trial = u + step * du;
        Vector rt = model.Residual(trial, gamma_prev, t, dt, mu);
        if (std::isfinite(rt.norm()) && rt.norm() < rnorm)
        {
          u = trial;
          rnorm = rt.norm();
          r = std::move(rt);
          accepted = true;
          break;
        }
      }
      it++;
      if (!accepted)
      {
        throw SolverError("unsteady Newton: line search failed at step " + std::to_string(k), u,
                          rnorm, static_cast<int>(k));
      }
    }
    traj.gamma.push_back(model.AdvanceGamma(u, gamma_prev, t, dt, mu));
    traj.states.push_back(std::move(u));
    traj.newton_iterations.push_back(it);
  }
  return traj;
}

}  // namespace morforge
