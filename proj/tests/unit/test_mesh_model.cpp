// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "morforge/creep_model.hpp"
#include "morforge/steady_model.hpp"

using namespace morforge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

constexpr double kPi = std::numbers::pi;

// Five-point Gauss-Legendre on [0, 1].
constexpr double kG5x[5] = {0.046910077030668, 0.230765344947158, 0.5, 0.769234655052842,
                            0.953089922969332};
constexpr double kG5w[5] = {0.118463442528095, 0.239314335249683, 0.284444444444444,
                            0.239314335249683, 0.118463442528095};

double L2ErrorToSine(const ReactionDiffusionModel &model, const Vector &u)
{
  const Vector nodal = model.ToNodal(u);
  const auto &x = model.GetMesh().Nodes();
  double e2 = 0.0;
  for (int k = 0; k < model.NumElements(); k++)
  {
    const double h = x[k + 1] - x[k];
    for (int q = 0; q < 5; q++)
    {
      const double xq = x[k] + kG5x[q] * h;
      const double uh = (1 - kG5x[q]) * nodal[k] + kG5x[q] * nodal[k + 1];
      e2 += kG5w[q] * h * std::pow(uh - std::sin(kPi * xq), 2);
    }
  }
  return std::sqrt(e2);
}

ReactionDiffusionModel ManufacturedModel(int n)
{
  ReactionDiffusionOptions o;
  o.source = [](double x) { return kPi * kPi * std::sin(kPi * x); };
  o.neumann_flux = -kPi;
  return ReactionDiffusionModel(Mesh::Uniform(n), o);
}

CreepBarModel UniformCreepBar(int n, double end_displacement)
{
  CreepBarOptions o;
  o.youngs_variation = 0.0;
  o.tau_variation = 0.0;
  o.foundation = 0.0;
  o.foundation_cubic = 0.0;
  o.body_force = 0.0;
  o.end = EndCondition::kDisplacement;
  o.end_value = end_displacement;
  o.box = ParamBox({0.1, 0.1}, {10.0, 1e15});
  return CreepBarModel(Mesh::Uniform(n), o);
}

}  // namespace

TEST_CASE("mesh hierarchy construction", "[mesh]")
{
  const auto one = BuildMeshHierarchy(4, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].NumElements() == 4);
  CHECK(one[0].NumFacets() == 5);
  int interior = 0;
  for (int j = 0; j < one[0].NumFacets(); j++)
  {
    const auto nb = one[0].FacetNeighborhood(j).size();
    CHECK((nb == 1 || nb == 2));
    interior += nb == 2;
  }
  CHECK(interior == 3);
  CHECK(one[0].FacetNeighborhood(0).size() == 1);
  CHECK(one[0].FacetNeighborhood(4).size() == 1);

  const auto three = BuildMeshHierarchy(4, 3);
  REQUIRE(three.size() == 3);
  CHECK(three[0].NumElements() == 4);
  CHECK(three[1].NumElements() == 8);
  CHECK(three[2].NumElements() == 16);
  CHECK(three[0].IsAncestorOf(three[1]));
  CHECK(three[1].IsAncestorOf(three[2]));
  CHECK_FALSE(three[2].IsAncestorOf(three[1]));
  for (int l = 0; l < 3; l++)
  {
    CHECK(three[l].Level() == l);
  }

  CHECK_THROWS_AS(BuildMeshHierarchy(1, 2), ArgumentError);
  CHECK_THROWS_AS(BuildMeshHierarchy(4, 0), ArgumentError);
}

TEST_CASE("facet measures sum to the domain length", "[mesh]")
{
  const Mesh m = Mesh::FromNodes({0.0, 0.1, 0.4, 0.5, 1.0});
  double sum = 0.0;
  for (int j = 0; j < m.NumFacets(); j++)
  {
    sum += m.FacetMeasure(j);
  }
  CHECK_THAT(sum, WithinAbs(1.0, 1e-15));
  CHECK_THAT(m.FacetMeasure(1), WithinAbs(0.5 * (0.1 + 0.3), 1e-15));
  CHECK_THROWS_AS(Mesh::FromNodes({0.0, 0.5, 0.5, 1.0}), ArgumentError);
}

TEST_CASE("prolongation of a linear function is exact", "[mesh]")
{
  const auto meshes = BuildMeshHierarchy(200, 2);
  std::vector<double> coarse;
  for (double x : meshes[0].Nodes())
  {
    coarse.push_back(x);
  }
  const Vector fine = Prolongate(coarse, meshes[0], meshes[1]);
  for (int i = 0; i < meshes[1].NumNodes(); i++)
  {
    CHECK_THAT(fine[i], WithinAbs(meshes[1].Nodes()[i], 1e-14));
  }
  CHECK_THROWS_AS(Prolongate(std::span<const double>(fine.data(), fine.size()), meshes[1], meshes[0]),
                  ArgumentError);
}

TEST_CASE("prolongated hat function keeps coarse point values", "[mesh]")
{
  const auto meshes = BuildMeshHierarchy(6, 2);
  const ReactionDiffusionModel coarse(meshes[0]), fine(meshes[1]);
  HfField hat{Vector::Zero(coarse.NumDofs()), 0};
  hat.values[2] = 1.0;
  const HfField p = Prolongate(hat, coarse, fine);
  const Vector pn = fine.ToNodal(p.values);
  const Vector cn = coarse.ToNodal(hat.values);
  Vector restricted(coarse.GetMesh().NumNodes());
  for (int i = 0; i < coarse.GetMesh().NumNodes(); i++)
  {
    CHECK(pn[2 * i] == cn[i]);
    restricted[i] = pn[2 * i];
  }
  CHECK((coarse.FromNodal(restricted) - hat.values).norm() == 0.0);
  CHECK_THAT(pn[5], WithinAbs(0.5, 1e-15));
}

TEST_CASE("residual with unit, zero and omitted weights", "[model]")
{
  const ReactionDiffusionModel model(Mesh::Uniform(8));
  std::mt19937_64 gen(3);
  const Vector w = testing::RandomVector(model.NumDofs(), gen);
  const ParamVec mu{1.3, 4.0};
  const QuadRule ones = QuadRule::AllOnes(model.NumElements(), model.NumFacets());
  CHECK((model.Residual(w, mu, &ones) - model.Residual(w, mu)).norm() == 0.0);
  QuadRule zeros = QuadRule::FromConcatenated(
    Vector::Zero(model.NumElements() + model.NumFacets()), model.NumElements());
  CHECK(model.Residual(w, mu, &zeros).norm() == 0.0);
  const QuadRule wrong = QuadRule::AllOnes(3, 4);
  CHECK_THROWS_AS(model.Residual(w, mu, &wrong), DimensionError);
  CHECK_THROWS_AS(model.Residual(Vector::Zero(3), mu), DimensionError);
}

TEST_CASE("weighted residual equals the brute-force sum of local residuals", "[model]")
{
  const ReactionDiffusionModel model(Mesh::Uniform(8));
  std::mt19937_64 gen(11);
  const Vector w = testing::RandomVector(model.NumDofs(), gen);
  const ParamVec mu{0.7, 9.0};
  Vector rho = testing::RandomVector(model.NumElements() + model.NumFacets(), gen, 0.0, 2.0);
  for (int i = 0; i < rho.size(); i += 3)
  {
    rho[i] = 0.0;
  }
  const QuadRule q = QuadRule::FromConcatenated(rho, model.NumElements());

  Vector oracle = Vector::Zero(model.NumDofs());
  const Vector nodal = model.ToNodal(w);
  for (int k = 0; k < model.NumElements(); k++)
  {
    const auto r = model.ElementResidual(k, {nodal[k], nodal[k + 1]}, mu);
    for (int a = 0; a < 2; a++)
    {
      const int dof = model.Dofs().Dof(k + a);
      if (dof >= 0)
      {
        oracle[dof] += rho[k] * r[a];
      }
    }
  }
  for (int j = 0; j < model.NumFacets(); j++)
  {
    const int dof = model.Dofs().Dof(j);
    if (dof >= 0)
    {
      oracle[dof] += rho[model.NumElements() + j] * model.FacetResidual(j, nodal[j], mu);
    }
  }
  CHECK((model.Residual(w, mu, &q) - oracle).norm() <= 1e-13 * oracle.norm());
}

TEST_CASE("local residuals depend only on their neighborhood", "[model]")
{
  const ReactionDiffusionModel model(Mesh::Uniform(10));
  std::mt19937_64 gen(5);
  Vector w = testing::RandomVector(model.NumDofs(), gen);
  const ParamVec mu{1.0, 5.0};
  const LocalResiduals before = model.EvaluateLocal(w, mu);
  const int node = 6;
  w[model.Dofs().Dof(node)] += 0.37;
  const LocalResiduals after = model.EvaluateLocal(w, mu);
  for (int k = 0; k < model.NumElements(); k++)
  {
    const bool touches = k == node - 1 || k == node;
    if (!touches)
    {
      CHECK(before.elem[k] == after.elem[k]);
    }
    else
    {
      CHECK(before.elem[k] != after.elem[k]);
    }
  }
  for (int j = 0; j < model.NumFacets(); j++)
  {
    if (j != node)
    {
      CHECK(before.facet[j] == after.facet[j]);
    }
  }

  // Zeroing the weight of element k changes only rows whose dofs touch D_k.
  const Vector full = model.Residual(w, mu);
  const int k = 4;
  Vector rho = Vector::Ones(model.NumElements() + model.NumFacets());
  rho[k] = 0.0;
  const QuadRule q = QuadRule::FromConcatenated(rho, model.NumElements());
  const Vector diff = model.Residual(w, mu, &q) - full;
  for (int i = 0; i < diff.size(); i++)
  {
    const int n = model.Dofs().Node(i);
    if (n != k && n != k + 1)
    {
      CHECK(diff[i] == 0.0);
    }
  }
}

TEST_CASE("analytic Jacobian matches finite differences", "[model]")
{
  const ReactionDiffusionModel model(Mesh::Uniform(12));
  std::mt19937_64 gen(8);
  const Vector w = testing::RandomVector(model.NumDofs(), gen);
  const ParamVec mu{1.5, 7.0};
  const Matrix jac = testing::Dense(model.Jacobian(w, mu));
  const double eps = 1e-7;
  for (int i = 0; i < model.NumDofs(); i++)
  {
    Vector wp = w, wm = w;
    wp[i] += eps;
    wm[i] -= eps;
    const Vector col = (model.Residual(wp, mu) - model.Residual(wm, mu)) / (2 * eps);
    CHECK((col - jac.col(i)).norm() <= 1e-6 * (1.0 + col.norm()));
  }
}

TEST_CASE("inner products are symmetric positive definite", "[model]")
{
  const ReactionDiffusionModel model(Mesh::Uniform(15));
  std::mt19937_64 gen(2);
  for (NormKind kind : {NormKind::kTrial, NormKind::kTest})
  {
    const InnerProduct &ip = model.GetInnerProduct(kind);
    const Matrix g = testing::Dense(ip.Gram());
    CHECK((g - g.transpose()).norm() <= 1e-15 * g.norm());
    for (int t = 0; t < 20; t++)
    {
      const Vector v = testing::RandomVector(model.NumDofs(), gen);
      CHECK(v.dot(g * v) > 0.0);
    }
  }
}

TEST_CASE("Riesz solves and dual norms", "[model]")
{
  const ReactionDiffusionModel model(Mesh::Uniform(40));
  std::mt19937_64 gen(4);
  const Vector v = testing::RandomVector(model.NumDofs(), gen);
  for (NormKind kind : {NormKind::kTrial, NormKind::kTest})
  {
    const InnerProduct &ip = model.GetInnerProduct(kind);
    const HfField back = RieszSolve(model, ip.Apply(v), kind);
    CHECK((back.values - v).norm() <= 1e-12 * v.norm());
    const Vector f = testing::RandomVector(model.NumDofs(), gen);
    const Matrix g = testing::Dense(ip.Gram());
    const double oracle = std::sqrt(f.dot(g.llt().solve(f)));
    CHECK_THAT(ip.DualNorm(f), WithinRel(oracle, 1e-12));
    CHECK(RieszSolve(model, Vector::Zero(model.NumDofs()), kind).values.norm() == 0.0);
  }
}

TEST_CASE("manufactured solution converges at second order", "[model]")
{
  std::vector<double> h, err;
  for (int n : {16, 32, 64})
  {
    const ReactionDiffusionModel model = ManufacturedModel(n);
    const SteadySolve s = SolveSteady(model, ParamVec{1.0, 0.0});
    h.push_back(1.0 / n);
    err.push_back(L2ErrorToSine(model, s.u.values));
  }
  // Least-squares slope of log(err) against log(h).
  double mx = 0, my = 0;
  for (int i = 0; i < 3; i++)
  {
    mx += std::log2(h[i]) / 3;
    my += std::log2(err[i]) / 3;
  }
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; i++)
  {
    sxy += (std::log2(h[i]) - mx) * (std::log2(err[i]) - my);
    sxx += std::pow(std::log2(h[i]) - mx, 2);
  }
  CHECK(sxy / sxx >= 1.9);
}

TEST_CASE("Newton from the exact solution and continuity in mu", "[model]")
{
  const ReactionDiffusionModel model(Mesh::Uniform(30));
  const ParamVec mu{1.1, 6.0};
  const SteadySolve s = SolveSteady(model, mu);
  CHECK(model.Residual(s.u.values, mu).norm() <= std::max(1e-10 * s.initial_residual_norm, 1e-12));
  const SteadySolve again = SolveSteady(model, mu, &s.u.values);
  CHECK(again.iterations <= 1);

  double prev = 1e300;
  for (double d : {1e-1, 1e-2, 1e-3, 1e-4})
  {
    const SteadySolve near = SolveSteady(model, ParamVec{1.1 + d, 6.0 - d});
    const double diff = (near.u.values - s.u.values).norm();
    CHECK(diff < prev);
    prev = diff;
  }
  CHECK(prev < 1e-3 * s.u.values.norm());
}

TEST_CASE("Newton failure carries the last iterate", "[model]")
{
  const ReactionDiffusionModel model(Mesh::Uniform(30));
  NewtonSettings ns;
  ns.max_iterations = 1;
  ns.rtol = 1e-14;
  ns.atol = 0.0;
  try
  {
    SolveSteady(model, ParamVec{0.5, 10.0}, nullptr, ns);
    FAIL("expected SolverError");
  }
  catch (const SolverError &e)
  {
    CHECK(e.LastIterate().size() == model.NumDofs());
    CHECK(e.ResidualNorm() > 0.0);
  }
  CHECK_THROWS_AS(SolveSteady(model, ParamVec{5.0, 1.0}), ArgumentError);
}

TEST_CASE("grid error decreases with coarse refinement", "[model]")
{
  const auto meshes = BuildMeshHierarchy(8, 5);
  const ParamVec mu{0.8, 3.0};
  const ReactionDiffusionModel fine(meshes.back());
  const HfField uf = SolveSteady(fine, mu).u;
  double prev = 1e300;
  for (int l = 0; l < 4; l++)
  {
    const ReactionDiffusionModel coarse(meshes[l]);
    const HfField uc = SolveSteady(coarse, mu).u;
    const HfField p = Prolongate(uc, coarse, fine);
    const double e = fine.TrialInnerProduct().Norm(p.values - uf.values) /
                     fine.TrialInnerProduct().Norm(uf.values);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("creep internal variable follows the relaxation law", "[creep]")
{
  const double strain = 0.02, tau = 0.5, final_time = 2.0;
  std::vector<double> errors;
  for (int steps : {40, 80, 160})
  {
    const CreepBarModel model = UniformCreepBar(6, strain);
    const Trajectory traj = SolveUnsteady(model, ParamVec{3.0, tau}, UniformTimeGrid(final_time, steps));
    double err = 0.0;
    for (int k = 1; k <= traj.NumSteps(); k++)
    {
      const double exact = strain * (1.0 - std::exp(-traj.times[k] / tau));
      for (double g : traj.gamma[k])
      {
        err = std::max(err, std::abs(g - exact));
      }
    }
    errors.push_back(err);
    const double dt = final_time / steps;
    CHECK(err <= strain * dt / tau);
  }
  CHECK_THAT(errors[0] / errors[1], WithinAbs(2.0, 0.15));
  CHECK_THAT(errors[1] / errors[2], WithinAbs(2.0, 0.15));
}

TEST_CASE("creep bar without relaxation is constant after the first step", "[creep]")
{
  const CreepBarModel model = UniformCreepBar(8, 0.01);
  const Trajectory traj = SolveUnsteady(model, ParamVec{2.0, 1e14}, UniformTimeGrid(1.0, 6));
  for (int k = 2; k <= traj.NumSteps(); k++)
  {
    CHECK((traj.states[k] - traj.states[1]).norm() <= 1e-10 * (1.0 + traj.states[1].norm()));
  }

  CreepBarOptions o;
  o.box = ParamBox({1.0, 0.2}, {10.0, 1e15});
  const CreepBarModel traction(Mesh::Uniform(10), o);
  const Trajectory t2 = SolveUnsteady(traction, ParamVec{2.0, 1e14}, UniformTimeGrid(1.0, 5));
  CHECK(t2.states[1].norm() > 0.0);
  for (int k = 2; k <= t2.NumSteps(); k++)
  {
    CHECK((t2.states[k] - t2.states[1]).norm() <= 1e-10 * t2.states[1].norm());
  }
}

TEST_CASE("creep residual Jacobian matches finite differences", "[creep]")
{
  const CreepBarModel model(Mesh::Uniform(9));
  std::mt19937_64 gen(12);
  const Vector w = testing::RandomVector(model.NumDofs(), gen, -0.1, 0.1);
  const std::vector<double> gprev(2 * model.NumElements(), 0.01);
  const ParamVec mu{4.0, 1.0};
  const Matrix jac = testing::Dense(model.Jacobian(w, gprev, 0.5, 0.1, mu));
  for (int i = 0; i < model.NumDofs(); i++)
  {
    Vector wp = w, wm = w;
    wp[i] += 1e-7;
    wm[i] -= 1e-7;
    const Vector col =
      (model.Residual(wp, gprev, 0.5, 0.1, mu) - model.Residual(wm, gprev, 0.5, 0.1, mu)) / 2e-7;
    CHECK((col - jac.col(i)).norm() <= 1e-5 * (1.0 + col.norm()));
  }
  CHECK_THROWS_AS(model.Residual(w, std::vector<double>(3, 0.0), 0.5, 0.1, mu), DimensionError);
}

TEST_CASE("creep solver rejects a non-increasing time grid", "[creep]")
{
  const CreepBarModel model(Mesh::Uniform(4));
  CHECK_THROWS_AS(SolveUnsteady(model, ParamVec{2.0, 1.0}, {0.0, 1.0, 1.0}), ArgumentError);
}
