// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/rom.hpp"

#include <cmath>
#include <limits>

#include <Eigen/QR>

namespace morforge
{

SteadyRom::SteadyRom(std::shared_ptr<const SteadyModel> model, Rob rob, TestSpaceState test,
                     QuadRule quad, GaussNewtonSettings settings)
  : model_(std::move(model)), rob_(std::move(rob)), test_(std::move(test)),
    quad_(std::move(quad)), settings_(settings)
{
  if (quad_.NumElements() != model_->NumElements() || quad_.NumFacets() != model_->NumFacets())
  {
    throw DimensionError("steady ROM: quadrature rule sized for a different mesh");
  }
  if (rob_.NumDofs() != model_->NumDofs() || test_.modes.rows() != model_->NumDofs())
  {
    throw DimensionError("steady ROM: bases do not match the model");
  }
  quad_.Validate();
  for (int k = 0; k < model_->NumElements(); k++)
  {
    if (quad_.elem_weights[k] != 0.0)
    {
      elems_.push_back({k, quad_.elem_weights[k], model_->ElementDofs(k)});
    }
  }
  for (int j = 0; j < model_->NumFacets(); j++)
  {
    if (quad_.facet_weights[j] != 0.0 && model_->FacetDof(j) >= 0)
    {
      facets_.push_back({j, quad_.facet_weights[j], model_->FacetDof(j)});
    }
  }
}

void SteadyRom::SetTrainingData(std::vector<ParamVec> mus, std::vector<Vector> alphas)
{
  if (mus.size() != alphas.size())
  {
    throw ArgumentError("steady ROM: training parameters and coordinates differ in count");
  }
  for (const auto &a : alphas)
  {
    if (a.size() != Size())
    {
      throw DimensionError("steady ROM: training coordinates do not match the basis size");
    }
  }
  train_mu_ = std::move(mus);
  train_alpha_ = std::move(alphas);
}

Vector SteadyRom::DefaultInit(const ParamVec &mu) const
{
  if (train_mu_.empty())
  {
    return Vector::Zero(Size());
  }
  std::size_t best = 0;
  double dbest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < train_mu_.size(); i++)
  {
    const double d = model_->Box().ScaledDistance(mu, train_mu_[i]);
    if (d < dbest)
    {
      dbest = d;
      best = i;
    }
  }
  return train_alpha_[best];
}

Vector SteadyRom::ReducedResidual(const Eigen::Ref<const Vector> &alpha, const ParamVec &mu,
                                  Matrix *jacobian) const
{
  const int m = test_.Size();
  const int n = Size();
  const Matrix &z = rob_.basis;
  const Matrix &psi = test_.modes;
  Vector res = Vector::Zero(m);
  if (jacobian)
  {
    jacobian->setZero(m, n);
  }
  for (const auto &e : elems_)
  {
    std::array<double, 2> w{};
    for (int a = 0; a < 2; a++)
    {
      w[a] = e.dofs[a] >= 0 ? z.row(e.dofs[a]).dot(alpha) : 0.0;
    }
    const auto r = model_->ElementResidual(e.k, w, mu);
    for (int a = 0; a < 2; a++)
    {
      if (e.dofs[a] >= 0)
      {
        res += e.rho * r[a] * psi.row(e.dofs[a]).transpose();
      }
    }
    if (jacobian && !settings_.fd_jacobian)
    {
      const Mat2 jl = model_->ElementJacobian(e.k, w, mu);
      for (int a = 0; a < 2; a++)
      {
        for (int b = 0; b < 2; b++)
        {
          if (e.dofs[a] >= 0 && e.dofs[b] >= 0)
          {
            jacobian->noalias() +=
              (e.rho * jl[a][b]) * psi.row(e.dofs[a]).transpose() * z.row(e.dofs[b]);
          }
        }
      }
    }
  }
  for (const auto &f : facets_)
  {
    const double w = z.row(f.dof).dot(alpha);
    res += f.rho * model_->FacetResidual(f.j, w, mu) * psi.row(f.dof).transpose();
    if (jacobian && !settings_.fd_jacobian)
    {
      jacobian->noalias() += (f.rho * model_->FacetJacobian(f.j, w, mu)) *
                             psi.row(f.dof).transpose() * z.row(f.dof);
    }
  }
  if (jacobian && settings_.fd_jacobian)
  {
    const double eps = 1e-7;
    for (int j = 0; j < n; j++)
    {
      Vector ap = alpha;
      ap[j] += eps;
      jacobian->col(j) = (ReducedResidual(ap, mu) - res) / eps;
    }
  }
  return res;
}

LspgResult SteadyRom::Solve(const ParamVec &mu, const Vector *alpha_init) const
{
  model_->Box().Require(mu);
  LspgResult out;
  out.alpha = alpha_init ? *alpha_init : DefaultInit(mu);
  if (out.alpha.size() != Size())
  {
    throw DimensionError("lspg_solve: initial coordinates do not match the basis size");
  }
  Matrix jac;
  Vector res = ReducedResidual(out.alpha, mu, &jac);
  double rnorm = res.norm();
  out.history.push_back(rnorm);
  for (out.iterations = 0; out.iterations < settings_.max_iterations; out.iterations++)
  {
    if (rnorm <= settings_.residual_tol)
    {
      break;
    }
    const Vector step = Eigen::CompleteOrthogonalDecomposition<Matrix>(jac).solve(-res);
    const double scale = std::max(1.0, out.alpha.norm());
    if (step.norm() <= settings_.step_tol * scale)
    {
      break;
    }
    double s = 1.0;
    bool accepted = false;
    for (int h = 0; h <= settings_.max_halvings; h++, s *= 0.5)
    {
      const Vector trial = out.alpha + s * step;
      Matrix jt;
      Vector rt = ReducedResidual(trial, mu, &jt);
      if (std::isfinite(rt.norm()) && rt.norm() < rnorm)
      {
        out.alpha = trial;
        res = std::move(rt);
        jac = std::move(jt);
        rnorm = res.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted)
    {
      // No decrease along the GN direction: stationary up to roundoff if the step is tiny.
      if (step.norm() <= 1e-6 * scale)
      {
        break;
      }
      throw SolverError("lspg_solve: line search failed after " +
                          std::to_string(out.iterations) + " iterations",
                        out.alpha, rnorm);
    }
    out.history.push_back(rnorm);
    if (s * step.norm() <= settings_.step_tol * scale)
    {
      out.iterations++;
      break;
    }
  }
  if (out.iterations == settings_.max_iterations)
  {
    throw SolverError("lspg_solve: Gauss-Newton did not converge", out.alpha, rnorm);
  }
  out.residual_norm = rnorm;
  return out;
}

LspgResult LspgSolve(const SteadyRom &rom, const ParamVec &mu, const Vector *alpha_init)
{
  return rom.Solve(mu, alpha_init);
}

double ErrorIndicator(const SteadyModel &model, const Eigen::Ref<const Vector> &u_rom,
                      const ParamVec &mu)
{
  return model.TestInnerProduct().DualNorm(model.Residual(u_rom, mu));
}

Vector ProjectCoordinates(const Rob &rob, const Eigen::Ref<const Vector> &u,
                          const InnerProduct &ip)
{
  return rob.basis.transpose() * ip.Apply(u);
}

Matrix JacobianTestSnapshots(const SteadyModel &model, const Rob &rob,
                             const Eigen::Ref<const Vector> &u, const ParamVec &mu)
{
  const Matrix jz = model.Jacobian(u, mu) * rob.basis;
  return model.TestInnerProduct().SolveColumns(jz);
}

Vector FdTestSnapshot(const SteadyModel &model, const Eigen::Ref<const Vector> &zeta,
                      const Eigen::Ref<const Vector> &u, const ParamVec &mu, double eps)
{
  const Vector up = u + eps * zeta;
  const Vector d = (model.Residual(up, mu) - model.Residual(u, mu)) / eps;
  return model.TestInnerProduct().Solve(d);
}

Matrix BuildTestSnapshots(const SteadyModel &model, const Rob &rob, const TrainingSnapshot &latest,
                          const std::vector<TrainingSnapshot> &prior, double eps)
{
  const int n = rob.Size();
  if (n == 0)
  {
    throw ArgumentError("build_test_snapshots: empty basis");
  }
  Matrix out(model.NumDofs(), n + prior.size());
  out.leftCols(n) = JacobianTestSnapshots(model, rob, latest.u, latest.mu);
  for (std::size_t k = 0; k < prior.size(); k++)
  {
    out.col(n + k) = FdTestSnapshot(model, rob.basis.col(n - 1), prior[k].u, prior[k].mu, eps);
  }
  return out;
}

Matrix BuildAllTestSnapshots(const SteadyModel &model, const Rob &rob,
                             const std::vector<TrainingSnapshot> &train)
{
  const int n = rob.Size();
  Matrix out(model.NumDofs(), n * train.size());
  for (std::size_t k = 0; k < train.size(); k++)
  {
    out.middleCols(k * n, n) = JacobianTestSnapshots(model, rob, train[k].u, train[k].mu);
  }
  return out;
}

UnsteadyRom::UnsteadyRom(std::shared_ptr<const CreepBarModel> model, Rob rob, QuadRule quad,
                         std::vector<double> time_grid, NewtonSettings settings)
  : model_(std::move(model)), rob_(std::move(rob)), quad_(std::move(quad)),
    times_(std::move(time_grid)), settings_(settings)
{
  if (quad_.NumElements() != model_->NumElements() || quad_.NumFacets() != model_->NumFacets())
  {
    throw DimensionError("unsteady ROM: quadrature rule sized for a different mesh");
  }
  if (rob_.NumDofs() != model_->NumDofs())
  {
    throw DimensionError("unsteady ROM: basis does not match the model");
  }
  if (times_.size() < 2)
  {
    throw ArgumentError("unsteady ROM: time grid needs at least two instants");
  }
  quad_.Validate();
  for (int k = 0; k < model_->NumElements(); k++)
  {
    if (quad_.elem_weights[k] != 0.0)
    {
      const auto nodes = model_->GetMesh().Element(k);
      elems_.push_back({k, quad_.elem_weights[k], {nodes[0], nodes[1]}, model_->ElementDofs(k)});
    }
  }
  for (int j = 0; j < model_->NumFacets(); j++)
  {
    if (quad_.facet_weights[j] != 0.0 && model_->FacetDof(j) >= 0)
    {
      facets_.push_back({j, quad_.facet_weights[j], model_->FacetDof(j)});
    }
  }
}

std::array<double, 2> UnsteadyRom::Local(const ActiveElement &e,
                                         const Eigen::Ref<const Vector> &alpha, double t) const
{
  std::array<double, 2> w{};
  for (int a = 0; a < 2; a++)
  {
    w[a] = e.dofs[a] >= 0 ? rob_.basis.row(e.dofs[a]).dot(alpha)
                          : model_->ConstrainedValue(e.nodes[a], t);
  }
  return w;
}

Vector UnsteadyRom::StepResidual(const Eigen::Ref<const Vector> &alpha,
                                 const std::vector<double> &gamma_prev, double t, double dt,
                                 const ParamVec &mu, Matrix *jacobian) const
{
  const int n = Size();
  const Matrix &z = rob_.basis;
  Vector res = Vector::Zero(n);
  if (jacobian)
  {
    jacobian->setZero(n, n);
  }
  for (std::size_t i = 0; i < elems_.size(); i++)
  {
    const auto &e = elems_[i];
    const auto w = Local(e, alpha, t);
    const auto r = model_->ElementResidual(e.k, w, &gamma_prev[2 * i], dt, mu);
    for (int a = 0; a < 2; a++)
    {
      if (e.dofs[a] >= 0)
      {
        res += e.rho * r[a] * z.row(e.dofs[a]).transpose();
      }
    }
    if (jacobian)
    {
      const Mat2 jl = model_->ElementJacobian(e.k, w, &gamma_prev[2 * i], dt, mu);
      for (int a = 0; a < 2; a++)
      {
        for (int b = 0; b < 2; b++)
        {
          if (e.dofs[a] >= 0 && e.dofs[b] >= 0)
          {
            jacobian->noalias() +=
              (e.rho * jl[a][b]) * z.row(e.dofs[a]).transpose() * z.row(e.dofs[b]);
          }
        }
      }
    }
  }
  for (const auto &f : facets_)
  {
    res += f.rho * model_->FacetResidual(f.j, t) * z.row(f.dof).transpose();
  }
  return res;
}

ReducedTrajectory UnsteadyRom::March(const ParamVec &mu) const
{
  model_->Box().Require(mu);
  const int n = Size();
  ReducedTrajectory out;
  out.times = times_;
  Vector alpha = Vector::Zero(n);
  std::vector<double> gamma(2 * elems_.size(), 0.0);
  auto tip = [&](const Vector &a, double t)
  {
    const int last = model_->GetMesh().NumNodes() - 1;
    const int d = model_->Dofs().Dof(last);
    return d >= 0 ? rob_.basis.row(d).dot(a) : model_->ConstrainedValue(last, t);
  };
  out.alphas.push_back(alpha);
  out.qoi.push_back(tip(alpha, times_[0]));
  out.newton_iterations.push_back(0);
  for (std::size_t k = 1; k < times_.size(); k++)
  {
    const double t = times_[k];
    const double dt = t - times_[k - 1];
    Matrix jac;
    Vector r = StepResidual(alpha, gamma, t, dt, mu, &jac);
    double rnorm = r.norm();
    const double target = std::max(settings_.rtol * rnorm, settings_.atol);
    int it = 0;
    while (rnorm > target && n > 0)
    {
      if (it == settings_.max_iterations)
      {
        throw SolverError("galerkin_march: Newton did not converge at step " + std::to_string(k),
                          alpha, rnorm, static_cast<int>(k));
      }
      const Vector da = Eigen::CompleteOrthogonalDecomposition<Matrix>(jac).solve(-r);
      double s = 1.0;
      bool accepted = false;
      for (int h = 0; h <= settings_.max_halvings; h++, s *= 0.5)
      {
        const Vector trial = alpha + s * da;
        Matrix jt;
        Vector rt = StepResidual(trial, gamma, t, dt, mu, &jt);
        if (std::isfinite(rt.norm()) && rt.norm() < rnorm)
        {
          alpha = trial;
          r = std::move(rt);
          jac = std::move(jt);
          rnorm = r.norm();
          accepted = true;
          break;
        }
      }
      it++;
      if (!accepted)
      {
        if (da.norm() <= 1e-12 * std::max(1.0, alpha.norm()))
        {
          break;
        }
        throw SolverError("galerkin_march: line search failed at step " + std::to_string(k),
                          alpha, rnorm, static_cast<int>(k));
      }
    }
    for (std::size_t i = 0; i < elems_.size(); i++)
    {
      const auto &e = elems_[i];
      const auto w = Local(e, alpha, t);
      const double strain = (w[1] - w[0]) / model_->GetMesh().ElementLength(e.k);
      for (int q = 0; q < GaussRule::kPoints; q++)
      {
        gamma[2 * i + q] = CreepBarModel::UpdateGamma(
          strain, gamma[2 * i + q], dt, model_->RelaxationTime(model_->GaussPoint(e.k, q), mu));
      }
    }
    out.alphas.push_back(alpha);
    out.qoi.push_back(tip(alpha, t));
    out.newton_iterations.push_back(it);
  }
  return out;
}

ReducedTrajectory GalerkinMarch(const UnsteadyRom &rom, const ParamVec &mu)
{
  return rom.March(mu);
}

std::vector<std::vector<double>> ReplayInternalVariables(const UnsteadyRom &rom,
                                                         const ReducedTrajectory &traj,
                                                         const ParamVec &mu)
{
  const auto &model = rom.Model();
  std::vector<std::vector<double>> out;
  out.emplace_back(2 * model.NumElements(), 0.0);
  for (std::size_t k = 1; k < traj.alphas.size(); k++)
  {
    const Vector u = rom.Reconstruct(traj.alphas[k]);
    out.push_back(model.AdvanceGamma(u, out.back(), traj.times[k],
                                     traj.times[k] - traj.times[k - 1], mu));
  }
  return out;
}

}  // namespace morforge
