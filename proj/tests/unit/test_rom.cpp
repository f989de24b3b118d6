// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>

#include <Eigen/Cholesky>

#include "helpers.hpp"
#include "morforge/rom.hpp"

using namespace morforge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

std::shared_ptr<const ReactionDiffusionModel> ToyModel(int n = 24)
{
  return std::make_shared<const ReactionDiffusionModel>(Mesh::Uniform(n));
}

// ROB from HF solutions, test space from their Jacobian images, unit quadrature.
SteadyRom RomFromSnapshots(const std::shared_ptr<const ReactionDiffusionModel> &model,
                           const std::vector<ParamVec> &mus, std::vector<Vector> *states = nullptr)
{
  Rob rob;
  std::vector<TrainingSnapshot> train;
  for (const auto &mu : mus)
  {
    const Vector u = SolveSteady(*model, mu).u.values;
    AppendToRob(rob, u, model->TrialInnerProduct());
    train.push_back({mu, u});
    if (states)
    {
      states->push_back(u);
    }
  }
  const Matrix snaps = BuildAllTestSnapshots(*model, rob, train);
  const PodBasis pod = Pod(snaps, PodTarget::Fixed(2 * rob.Size()), model->TestInnerProduct());
  TestSpaceState test{pod.modes, pod.eigenvalues.head(pod.Size())};
  return SteadyRom(model, rob, test, QuadRule::AllOnes(model->NumElements(), model->NumFacets()));
}

double Pearson(const std::vector<double> &x, const std::vector<double> &y)
{
  const int n = static_cast<int>(x.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; i++)
  {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < n; i++)
  {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_CASE("lspg reproduces a snapshot contained in the basis", "[lspg]")
{
  const auto model = ToyModel();
  std::vector<Vector> states;
  const SteadyRom rom = RomFromSnapshots(model, {{0.7, 2.0}, {1.5, 8.0}, {1.1, 5.0}}, &states);
  const LspgResult r = rom.Solve(ParamVec{1.5, 8.0});
  CHECK(r.residual_norm <= 1e-9);
  CHECK((rom.Reconstruct(r.alpha) - states[1]).norm() <= 1e-8 * states[1].norm());
  for (std::size_t i = 1; i < r.history.size(); i++)
  {
    CHECK(r.history[i] < r.history[i - 1]);
  }
}

TEST_CASE("one-mode lspg recovers the snapshot norm", "[lspg]")
{
  const auto model = ToyModel();
  const ParamVec mu{1.2, 3.0};
  const Vector u = SolveSteady(*model, mu).u.values;
  const SteadyRom rom = RomFromSnapshots(model, {mu});
  REQUIRE(rom.Size() == 1);
  const LspgResult r = rom.Solve(mu);
  const double norm = model->TrialInnerProduct().Norm(u);
  CHECK_THAT(std::abs(r.alpha[0]), WithinRel(norm, 1e-8));
  CHECK_THAT(r.alpha[0], WithinRel(ProjectCoordinates(rom.GetRob(), u, model->TrialInnerProduct())[0],
                                   1e-8));
}

TEST_CASE("reduced residual equals the tested HF residual under unit weights", "[lspg]")
{
  const auto model = ToyModel(20);
  const SteadyRom rom = RomFromSnapshots(model, {{0.6, 1.0}, {1.8, 9.0}, {1.0, 4.0}});
  std::mt19937_64 gen(31);
  const Vector alpha = testing::RandomVector(rom.Size(), gen);
  const ParamVec mu{1.3, 6.0};
  Matrix jac;
  const Vector r = rom.ReducedResidual(alpha, mu, &jac);
  const Vector u = rom.Reconstruct(alpha);
  const Matrix &psi = rom.Test().modes;
  const Vector oracle = psi.transpose() * model->Residual(u, mu);
  CHECK((r - oracle).norm() <= 1e-12 * (1 + oracle.norm()));
  const Matrix joracle = psi.transpose() * testing::Dense(model->Jacobian(u, mu)) * rom.GetRob().basis;
  CHECK((jac - joracle).norm() <= 1e-12 * (1 + joracle.norm()));

  // Finite-difference Jacobian option agrees to FD accuracy.
  SteadyRom fd(model, rom.GetRob(), rom.Test(), rom.Quad(), GaussNewtonSettings{.fd_jacobian = true});
  Matrix jfd;
  fd.ReducedResidual(alpha, mu, &jfd);
  CHECK((jfd - jac).norm() <= 1e-5 * jac.norm());
  const LspgResult a = rom.Solve(mu), b = fd.Solve(mu);
  CHECK((a.alpha - b.alpha).norm() <= 1e-6 * a.alpha.norm());
}

TEST_CASE("sparse weights drop inactive rows", "[lspg]")
{
  const auto model = ToyModel(20);
  const SteadyRom full = RomFromSnapshots(model, {{0.6, 1.0}, {1.8, 9.0}});
  std::mt19937_64 gen(32);
  Vector rho = testing::RandomVector(model->NumElements() + model->NumFacets(), gen, 0.5, 1.5);
  for (int i = 0; i < rho.size(); i += 2)
  {
    rho[i] = 0.0;
  }
  const QuadRule q = QuadRule::FromConcatenated(rho, model->NumElements());
  const SteadyRom sparse(model, full.GetRob(), full.Test(), q);
  const Vector alpha = testing::RandomVector(full.Size(), gen);
  const ParamVec mu{1.0, 2.0};
  const Vector oracle =
    full.Test().modes.transpose() * model->Residual(full.Reconstruct(alpha), mu, &q);
  CHECK((sparse.ReducedResidual(alpha, mu) - oracle).norm() <= 1e-12 * (1 + oracle.norm()));
  CHECK_THROWS_AS(SteadyRom(model, full.GetRob(), full.Test(), QuadRule::AllOnes(3, 4)),
                  DimensionError);
  CHECK_THROWS_AS(sparse.Solve(ParamVec{9.0, 1.0}), ArgumentError);
}

TEST_CASE("error indicator vanishes at the HF solution and matches a dense oracle", "[indicator]")
{
  const auto model = ToyModel(40);
  const ParamVec mu{0.9, 7.0};
  const Vector u = SolveSteady(*model, mu).u.values;
  const double at_zero = ErrorIndicator(*model, Vector::Zero(model->NumDofs()), mu);
  CHECK(ErrorIndicator(*model, u, mu) <= 1e-10 * at_zero);

  std::mt19937_64 gen(33);
  const Vector w = u + 0.05 * testing::RandomVector(model->NumDofs(), gen);
  const Vector r = model->Residual(w, mu);
  const Matrix k = testing::Dense(model->TestInnerProduct().Gram());
  const Matrix kinv = k.inverse();
  const double oracle = std::sqrt(r.dot(kinv * r));
  CHECK_THAT(ErrorIndicator(*model, w, mu), WithinRel(oracle, 1e-10));

  // Sup form: max over v of r.v / ||v||, attained at v = K^{-1} r.
  const Vector v = kinv * r;
  CHECK_THAT(r.dot(v) / std::sqrt(v.dot(k * v)), WithinRel(oracle, 1e-10));
  for (int t = 0; t < 20; t++)
  {
    const Vector z = testing::RandomVector(model->NumDofs(), gen);
    CHECK(r.dot(z) / std::sqrt(z.dot(k * z)) <= oracle * (1 + 1e-12));
  }

  for (double c : {0.5, 3.0, 1e3})
  {
    CHECK_THAT(model->TestInnerProduct().DualNorm(c * r),
               WithinRel(c * model->TestInnerProduct().DualNorm(r), 1e-13));
  }
}

TEST_CASE("indicator correlates with the true error", "[indicator]")
{
  const auto model = ToyModel(30);
  const SteadyRom rom = RomFromSnapshots(model, {{0.5, 0.0}, {2.0, 10.0}, {1.0, 5.0}});
  std::vector<double> err, ind;
  for (int i = 0; i < 6; i++)
  {
    for (int j = 0; j < 6; j++)
    {
      const ParamVec mu{0.5 + 1.5 * i / 5.0, 10.0 * j / 5.0};
      const Vector u = SolveSteady(*model, mu).u.values;
      const Vector ur = rom.Reconstruct(rom.Solve(mu).alpha);
      err.push_back(model->TrialInnerProduct().Norm(u - ur));
      ind.push_back(ErrorIndicator(*model, ur, mu));
    }
  }
  CHECK(Pearson(ind, err) >= 0.9);
}

TEST_CASE("test snapshots by Jacobian and finite differences", "[test-space]")
{
  const auto model = ToyModel(25);
  Rob rob;
  std::vector<TrainingSnapshot> train;
  for (const ParamVec &mu : {ParamVec{0.8, 4.0}, ParamVec{1.6, 9.0}, ParamVec{1.2, 1.0}})
  {
    const Vector u = SolveSteady(*model, mu).u.values;
    AppendToRob(rob, u, model->TrialInnerProduct());
    train.push_back({mu, u});
  }
  Rob one;
  one.basis = rob.basis.leftCols(1);
  CHECK(BuildTestSnapshots(*model, one, train[0], {}).cols() == 1);

  const std::vector<TrainingSnapshot> prior(train.begin(), train.begin() + 2);
  const Matrix s = BuildTestSnapshots(*model, rob, train[2], prior);
  CHECK(s.cols() == 2 * 3 - 1);
  const Matrix jac_all = BuildAllTestSnapshots(*model, rob, train);
  CHECK((s.leftCols(3) - jac_all.middleCols(6, 3)).norm() <= 1e-13 * jac_all.norm());
  for (int k = 0; k < 2; k++)
  {
    const Vector jac_route = jac_all.col(3 * k + 2);
    CHECK((s.col(3 + k) - jac_route).norm() <= 1e-4 * jac_route.norm());
  }

  const auto lin = model;
  const ParamVec mu0{1.3, 0.0};
  const Vector u0 = SolveSteady(*lin, mu0).u.values;
  const Vector fd = FdTestSnapshot(*lin, rob.basis.col(1), u0, mu0);
  const Vector ex = JacobianTestSnapshots(*lin, rob, u0, mu0).col(1);
  CHECK((fd - ex).norm() <= 1e-8 * ex.norm());
  CHECK_THROWS_AS(BuildTestSnapshots(*model, Rob{}, train[0], {}), ArgumentError);
}

TEST_CASE("full-basis Galerkin march equals the HF trajectory", "[galerkin]")
{
  const auto model = std::make_shared<const CreepBarModel>(Mesh::Uniform(12));
  const Matrix gram = testing::Dense(model->TrialInnerProduct().Gram());
  Rob rob;
  rob.basis = testing::SpanBasis(Matrix::Identity(model->NumDofs(), model->NumDofs()), gram);
  REQUIRE(rob.Size() == model->NumDofs());
  const std::vector<double> grid = UniformTimeGrid(2.0, 8);
  NewtonSettings ns;
  ns.rtol = 1e-12;
  ns.atol = 1e-14;
  const UnsteadyRom rom(model, rob, QuadRule::AllOnes(model->NumElements(), model->NumFacets()),
                        grid, ns);
  const ParamVec mu{4.0, 0.7};
  const Trajectory hf = SolveUnsteady(*model, mu, grid, ns);
  const ReducedTrajectory red = GalerkinMarch(rom, mu);
  REQUIRE(red.alphas.size() == hf.states.size());
  for (std::size_t k = 0; k < hf.states.size(); k++)
  {
    CHECK((rom.Reconstruct(red.alphas[k]) - hf.states[k]).norm() <=
          1e-8 * (1e-12 + hf.states[k].norm()));
    CHECK_THAT(red.qoi[k], WithinAbs(model->TipDisplacement(hf.states[k], hf.times[k]), 1e-9));
  }
  const auto gamma = ReplayInternalVariables(rom, red, mu);
  for (std::size_t k = 0; k < gamma.size(); k++)
  {
    for (std::size_t q = 0; q < gamma[k].size(); q++)
    {
      CHECK_THAT(gamma[k][q], WithinAbs(hf.gamma[k][q], 1e-9));
    }
  }
  CHECK(rom.NumTrackedGaussPoints() == 2 * model->NumElements());
}

TEST_CASE("one-mode Galerkin on a uniform-strain bar matches the relaxation law", "[galerkin]")
{
  CreepBarOptions o;
  o.youngs_variation = 0.0;
  o.tau_variation = 0.0;
  o.foundation = 0.0;
  o.foundation_cubic = 0.0;
  o.body_force = 0.0;
  o.end = EndCondition::kDisplacement;
  o.end_value = 0.03;
  o.box = ParamBox({0.1, 0.1}, {10.0, 10.0});
  const auto model = std::make_shared<const CreepBarModel>(Mesh::Uniform(10), o);
  const std::vector<double> grid = UniformTimeGrid(1.0, 50);
  const ParamVec mu{2.0, 0.4};
  const Trajectory hf = SolveUnsteady(*model, mu, grid);
  Vector x(model->NumDofs());
  for (int i = 0; i < model->NumDofs(); i++)
  {
    x[i] = model->GetMesh().Nodes()[model->Dofs().Node(i)];
  }
  Rob rob;
  if (x.size() > 0)
  {
    REQUIRE(AppendToRob(rob, x, model->TrialInnerProduct()));
  }
  const UnsteadyRom rom(model, rob, QuadRule::AllOnes(model->NumElements(), model->NumFacets()),
                        grid);
  const ReducedTrajectory red = rom.March(mu);
  const auto replay = ReplayInternalVariables(rom, red, mu);
  for (std::size_t k = 1; k < grid.size(); k++)
  {
    CHECK((rom.Reconstruct(red.alphas[k]) - hf.states[k]).norm() <= 1e-9);
    const double exact = o.end_value * (1.0 - std::exp(-grid[k] / mu[1]));
    const double dt = grid[1] - grid[0];
    for (double g : replay[k])
    {
      CHECK(std::abs(g - exact) <= o.end_value * dt / mu[1]);
    }
  }
}

TEST_CASE("converged Galerkin step is stationary in every trial mode", "[galerkin]")
{
  const auto model = std::make_shared<const CreepBarModel>(Mesh::Uniform(16));
  const std::vector<double> grid = UniformTimeGrid(1.0, 5);
  const ParamVec mu{3.0, 1.0};
  Rob rob;
  const Trajectory hf = SolveUnsteady(*model, mu, grid);
  for (int k = 1; k <= hf.NumSteps(); k++)
  {
    AppendToRob(rob, hf.states[k], model->TrialInnerProduct());
  }
  NewtonSettings ns;
  ns.rtol = 1e-11;
  ns.atol = 1e-13;
  const UnsteadyRom rom(model, rob, QuadRule::AllOnes(model->NumElements(), model->NumFacets()),
                        grid, ns);
  const ReducedTrajectory red = rom.March(ParamVec{2.5, 1.5});
  const auto gamma = ReplayInternalVariables(rom, red, ParamVec{2.5, 1.5});
  for (std::size_t k = 1; k < grid.size(); k++)
  {
    const Vector r = model->Residual(rom.Reconstruct(red.alphas[k]), gamma[k - 1], grid[k],
                                     grid[k] - grid[k - 1], ParamVec{2.5, 1.5});
    const Vector rr = rob.basis.transpose() * r;
    const Vector r0 = rob.basis.transpose() *
                      model->Residual(rom.Reconstruct(red.alphas[k - 1]), gamma[k - 1], grid[k],
                                      grid[k] - grid[k - 1], ParamVec{2.5, 1.5});
    CHECK(rr.norm() <= std::max(1e-11 * r0.norm(), 1e-13) * 1.01);
  }
}
