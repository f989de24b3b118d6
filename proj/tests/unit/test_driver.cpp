// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "morforge/driver.hpp"

using namespace morforge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

std::shared_ptr<const ReactionDiffusionModel> Toy(int n = 50, int level = 0)
{
  return std::make_shared<const ReactionDiffusionModel>(Mesh::Uniform(n, 0.0, 1.0, level));
}

GreedyConfig ToyConfig(const ParamBox &box, int grid = 6)
{
  GreedyConfig c;
  c.train = TrainGrid(box, {{grid, grid}, {}});
  c.timing = false;
  return c;
}

// Max relative trial error of the ROM over the training grid.
double MaxTrainError(const SteadyRom &rom, const std::vector<ParamVec> &train)
{
  return EvaluateSteadyRom(rom, train).e_max;
}

}  // namespace

TEST_CASE("training grids and random parameters", "[grid]")
{
  const ParamBox box({0.5, 1.0}, {2.0, 100.0});
  const auto lin = TrainGrid(box, {{3, 2}, {}});
  REQUIRE(lin.size() == 6);
  std::set<double> a, b;
  for (const auto &mu : lin)
  {
    a.insert(mu[0]);
    b.insert(mu[1]);
    CHECK(box.Contains(mu));
  }
  CHECK(a == std::set<double>{0.5, 1.25, 2.0});
  CHECK(b == std::set<double>{1.0, 100.0});
  const auto lg = TrainGrid(box, {{1, 3}, {false, true}});
  REQUIRE(lg.size() == 3);
  std::set<double> c;
  for (const auto &mu : lg)
  {
    c.insert(std::round(mu[1] * 1e9) / 1e9);
  }
  CHECK(c == std::set<double>{1.0, 10.0, 100.0});
  CHECK_THROWS(TrainGrid(ParamBox({0.0}, {1.0}), {{3}, {true}}));

  const auto r1 = RandomParams(box, 10, 7), r2 = RandomParams(box, 10, 7);
  CHECK(r1 == r2);
  CHECK(r1 != RandomParams(box, 10, 8));
  for (const auto &mu : r1)
  {
    CHECK(box.Contains(mu));
  }
}

TEST_CASE("random sequences are deterministic prefixes of permutations", "[metrics]")
{
  const auto s = RandomSequence(30, 30, 4);
  std::vector<int> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 30; i++)
  {
    CHECK(sorted[i] == i);
  }
  CHECK(RandomSequence(30, 10, 4) == RandomSequence(30, 10, 4));
  CHECK(RandomSequence(30, 10, 4) != RandomSequence(30, 10, 5));
  CHECK(RandomSequence(30, 10, 4).size() == 10);
}

TEST_CASE("spearman correlation", "[metrics]")
{
  const std::vector<double> x{1, 2, 3, 4, 5};
  CHECK_THAT(SpearmanCorrelation(x, {2, 4, 8, 16, 32}), WithinAbs(1.0, 1e-15));
  CHECK_THAT(SpearmanCorrelation(x, {5, 4, 3, 2, 1}), WithinAbs(-1.0, 1e-15));
  // Ties take mean ranks: y ranks (1.5, 1.5, 3, 4, 5).
  const std::vector<double> y{1, 1, 2, 3, 4};
  const double rx[] = {1, 2, 3, 4, 5}, ry[] = {1.5, 1.5, 3, 4, 5};
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < 5; i++)
  {
    sxy += (rx[i] - 3) * (ry[i] - 3);
    sxx += (rx[i] - 3) * (rx[i] - 3);
    syy += (ry[i] - 3) * (ry[i] - 3);
  }
  CHECK_THAT(SpearmanCorrelation(x, y), WithinAbs(sxy / std::sqrt(sxx * syy), 1e-14));
  CHECK_THROWS_AS(SpearmanCorrelation({1.0}, {1.0}), ArgumentError);
}

TEST_CASE("metrics vanish for exact approximations", "[metrics]")
{
  const auto meshes = BuildMeshHierarchy(10, 2);
  const ReactionDiffusionModel fine(meshes[1]);
  const ParamVec mu{1.0, 3.0};
  const HfField u = SolveSteady(fine, mu).u;
  CHECK(GridError(u, fine, u, fine) == 0.0);

  std::mt19937_64 gen(41);
  const Matrix s = testing::RandomMatrix(fine.NumDofs(), 4, gen) *
                   testing::RandomMatrix(4, 9, gen);
  const auto errs = SamplingProjectionErrors(s, {0, 1, 2, 3, 4, 5}, fine.TrialInnerProduct());
  REQUIRE(errs.size() == 6);
  CHECK(errs[3] <= 1e-8);
  CHECK(errs[5] <= 1e-8);
  for (std::size_t i = 1; i < errs.size(); i++)
  {
    CHECK(errs[i] <= errs[i - 1] + 1e-14);
  }
  const auto padded = SamplingProjectionErrors(s, {0, 1}, fine.TrialInnerProduct(), 4);
  REQUIRE(padded.size() == 4);
  CHECK(padded[3] == padded[1]);
  CHECK_THROWS_AS(SamplingProjectionErrors(Matrix(3, 0), {}, fine.TrialInnerProduct()),
                  ArgumentError);

  const std::vector<double> t{0.0, 0.5, 1.0};
  const QoiErrors q = QoiError(t, {0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
  CHECK(q.e_max == 0.0);
  CHECK(q.e_avg == 0.0);
  const QoiErrors q2 = QoiError(t, {0.0, 1.0, 2.0}, {0.0, 1.5, 2.0});
  CHECK_THAT(q2.e_max, WithinAbs(0.25, 1e-15));
  CHECK_THAT(q2.e_avg, WithinAbs(0.5 * 0.5 / 1.5, 1e-15));
  CHECK_THROWS_AS(QoiError(t, {1.0}, {1.0}), ArgumentError);

  const CreepBarModel bar(Mesh::Uniform(8));
  const Trajectory traj = SolveUnsteady(bar, ParamVec{3.0, 1.0}, UniformTimeGrid(1.0, 4));
  Rob full;
  full.basis = testing::SpanBasis(Matrix::Identity(bar.NumDofs(), bar.NumDofs()),
                                  testing::Dense(bar.TrialInnerProduct().Gram()));
  CHECK(TrajectoryProjectionError(full, traj, bar.TrialInnerProduct()) <= 1e-12);
  Rob empty;
  empty.basis.resize(bar.NumDofs(), 0);
  CHECK_THAT(TrajectoryProjectionError(empty, traj, bar.TrialInnerProduct()), WithinAbs(1.0, 1e-14));
}

TEST_CASE("huge tolerance stops after the first greedy iteration", "[greedy]")
{
  const auto model = Toy(30);
  GreedyConfig c = ToyConfig(model->Box(), 5);
  c.tol = 10.0;
  c.variant = GreedyVariant::kVanilla;
  const SteadyGreedyResult r = WeakGreedySteady(c, model);
  REQUIRE(r.trace.NumHfSolves() == 6);
  const GreedyRecord &last = r.trace.records.back();
  CHECK(last.true_rel_err < 10.0);
  CHECK(last.indicator_max >= 0.0);
  CHECK(r.snapshots.size() == r.trace.records.size());
  for (int i = 0; i < r.trace.NumHfSolves(); i++)
  {
    CHECK(r.trace.records[i].iter == i);
  }
}

TEST_CASE("greedy runs are deterministic", "[greedy]")
{
  const auto model = Toy(30);
  GreedyConfig c = ToyConfig(model->Box(), 5);
  c.tol = 1e-3;
  c.compare_cold = true;
  const SteadyGreedyResult a = WeakGreedySteady(c, model);
  const SteadyGreedyResult b = WeakGreedySteady(c, model);
  REQUIRE(a.trace.records.size() == b.trace.records.size());
  for (std::size_t i = 0; i < a.trace.records.size(); i++)
  {
    const auto &x = a.trace.records[i], &y = b.trace.records[i];
    CHECK(x.mu == y.mu);
    CHECK(x.n == y.n);
    CHECK(x.m == y.m);
    CHECK(x.nnls_solves == y.nnls_solves);
    CHECK(x.nnls_solves_cold == y.nnls_solves_cold);
    CHECK(x.nnz_elem == y.nnz_elem);
    CHECK(x.nnz_facet == y.nnz_facet);
  }
  CHECK(a.rom->GetRob().basis == b.rom->GetRob().basis);
}

TEST_CASE("incremental greedy converges on the toy model", "[greedy]")
{
  const auto model = Toy(50);
  GreedyConfig c = ToyConfig(model->Box(), 10);
  c.tol = 1e-3;
  c.compare_cold = true;
  const SteadyGreedyResult r = WeakGreedySteady(c, model);
  CHECK(r.trace.NumHfSolves() <= 15);
  CHECK(MaxTrainError(*r.rom, c.train) <= 5e-3);
  int warm = 0, cold = 0;
  for (const auto &rec : r.trace.records)
  {
    CHECK(rec.nnls_solves >= 0);
    if (rec.nnls_solves_cold >= 0)
    {
      warm += rec.nnls_solves;
      cold += rec.nnls_solves_cold;
    }
    if (!std::isnan(rec.eq_residual))
    {
      CHECK(rec.eq_residual <= c.delta * (1 + 1e-9));
    }
  }
  CHECK(warm <= cold);
  CHECK(OrthonormalityDefect(r.rom->GetRob().basis, model->TrialInnerProduct()) <= 1e-10);
  CHECK(OrthonormalityDefect(r.rom->Test().modes, model->TestInnerProduct()) <= 1e-10);
}

TEST_CASE("vanilla and incremental greedy reach similar accuracy", "[greedy]")
{
  const auto model = Toy(40);
  GreedyConfig c = ToyConfig(model->Box(), 6);
  c.tol = 1e-12;
  c.n_max = 7;
  c.variant = GreedyVariant::kVanilla;
  const SteadyGreedyResult v = WeakGreedySteady(c, model);
  c.variant = GreedyVariant::kIncremental;
  const SteadyGreedyResult i = WeakGreedySteady(c, model);
  REQUIRE(v.rom->Size() == i.rom->Size());
  const auto test = RandomParams(model->Box(), 12, 3);
  const double ev = EvaluateSteadyRom(*v.rom, test).e_avg;
  const double ei = EvaluateSteadyRom(*i.rom, test).e_avg;
  CHECK(ev <= 2.0 * ei);
  CHECK(ei <= 2.0 * ev);
}

TEST_CASE("trained ROM error at a training parameter is bounded by the projection error",
          "[greedy]")
{
  const auto model = Toy(40);
  GreedyConfig c = ToyConfig(model->Box(), 5);
  c.tol = 1e-12;
  c.n_max = 6;
  const SteadyGreedyResult r = WeakGreedySteady(c, model);
  for (const auto &s : r.snapshots)
  {
    const Vector ur = r.rom->Reconstruct(r.rom->Solve(s.mu).alpha);
    const InnerProduct &ip = model->TrialInnerProduct();
    const double err = ip.Norm(s.u - ur) / ip.Norm(s.u);
    const double proj =
      RelativeProjectionErrors(s.u, r.rom->GetRob().basis, ip)[0];
    CHECK(err <= 10.0 * std::max(proj, 1e-7));
  }
}

TEST_CASE("multi-fidelity seeding picks training parameters", "[mf]")
{
  const auto meshes = BuildMeshHierarchy(25, 2);
  const auto coarse = std::make_shared<const ReactionDiffusionModel>(meshes[0]);
  const auto fine = std::make_shared<const ReactionDiffusionModel>(meshes[1]);
  GreedyConfig c = ToyConfig(fine->Box(), 6);
  c.tol = 1e-3;
  c.variant = GreedyVariant::kMultiFidelity;
  const MultiFidelityResult r = MultiFidelityGreedy(c, coarse, fine);
  const int n0 = static_cast<int>(r.seed_indices.size());
  CHECK(n0 >= 1);
  CHECK(n0 <= r.coarse.rom->Size());
  CHECK(r.coarse_coordinates.cols() == static_cast<int>(c.train.size()));
  std::set<int> unique(r.seed_indices.begin(), r.seed_indices.end());
  CHECK(static_cast<int>(unique.size()) == n0);
  for (int k = 0; k < n0; k++)
  {
    REQUIRE(r.seed_indices[k] >= 0);
    REQUIRE(r.seed_indices[k] < static_cast<int>(c.train.size()));
    CHECK(r.fine.trace.records[k].mu == c.train[r.seed_indices[k]]);
  }
  CHECK(r.fine.rom->Model().NumDofs() == fine->NumDofs());
  CHECK(r.fine.trace.overhead_s >= 0.0);

  // Seeds are the strong-greedy choice on the coordinate vectors.
  const StrongGreedyResult sg =
    StrongGreedy(r.coarse_coordinates, n0, -1.0, InnerProduct::Euclidean(r.coarse.rom->Size()));
  CHECK(sg.indices == r.seed_indices);
}

TEST_CASE("multi-fidelity with a degenerate hierarchy still runs", "[mf]")
{
  const auto model = Toy(20);
  GreedyConfig c = ToyConfig(model->Box(), 4);
  c.tol = 1e-3;
  c.variant = GreedyVariant::kMultiFidelity;
  const MultiFidelityResult r = MultiFidelityGreedy(c, model, model);
  CHECK(!r.seed_indices.empty());
  CHECK(static_cast<int>(r.seed_indices.size()) <= r.coarse.rom->Size());
  CHECK(r.fine.trace.NumHfSolves() >= static_cast<int>(r.seed_indices.size()));
}

TEST_CASE("unsteady POD-greedy with one iteration", "[unsteady]")
{
  const auto model = std::make_shared<const CreepBarModel>(Mesh::Uniform(20));
  UnsteadyConfig c;
  c.train = TrainGrid(model->Box(), {{3, 3}, {true, true}});
  c.time_grid = UniformTimeGrid(2.0, 8);
  c.maxit = 1;
  c.timing = false;
  const UnsteadyGreedyResult r = PodGreedyUnsteady(c, model, nullptr);
  REQUIRE(r.order.size() == 1);
  const Trajectory traj = SolveUnsteady(*model, c.train[r.order[0]], c.time_grid);
  CHECK(TrajectoryProjectionError(r.rob, traj, model->TrialInnerProduct()) <= c.tol);
  REQUIRE(r.per_delta.size() == 3);
  for (const auto &d : r.per_delta)
  {
    REQUIRE(d.records.size() == 1);
    CHECK(d.records[0].eq_residual <= d.delta * (1 + 1e-9));
    CHECK(d.rom->Size() == r.rob.Size());
  }
  CHECK(r.rows_added[0] == 8 * r.rob.Size() + 2);
}

TEST_CASE("unsteady warm starts never cost more than cold starts", "[unsteady]")
{
  const auto model = std::make_shared<const CreepBarModel>(Mesh::Uniform(20));
  UnsteadyConfig c;
  c.train = TrainGrid(model->Box(), {{4, 4}, {true, true}});
  c.time_grid = UniformTimeGrid(2.0, 10);
  c.maxit = 6;
  c.timing = false;
  c.deltas = {1e-4};
  const UnsteadyGreedyResult r = PodGreedyUnsteady(c, model, nullptr);
  CHECK(r.order.size() == 6);
  std::set<int> unique(r.order.begin(), r.order.end());
  CHECK(unique.size() == r.order.size());
  int warm = 0, cold = 0;
  for (const auto &rec : r.per_delta[0].records)
  {
    CHECK(rec.nnls_solves <= rec.nnls_solves_cold);
    warm += rec.nnls_solves;
    cold += rec.nnls_solves_cold;
  }
  CHECK(warm < cold);
  for (std::size_t i = 1; i < r.n_after_iteration.size(); i++)
  {
    CHECK(r.n_after_iteration[i] >= r.n_after_iteration[i - 1]);
  }
  const UnsteadyGreedyResult again = PodGreedyUnsteady(c, model, nullptr);
  CHECK(again.order == r.order);
  CHECK(again.rob.basis == r.rob.basis);
}

TEST_CASE("invalid greedy configurations are rejected", "[greedy]")
{
  const auto model = Toy(10);
  GreedyConfig c = ToyConfig(model->Box(), 2);
  c.delta = 1.5;
  CHECK_THROWS_AS(WeakGreedySteady(c, model), ConfigError);
  c.delta = 1e-4;
  c.tol = 0.0;
  CHECK_THROWS_AS(WeakGreedySteady(c, model), ConfigError);
  c.tol = 1e-3;
  c.train.clear();
  CHECK_THROWS_AS(WeakGreedySteady(c, model), ConfigError);
  CHECK(GreedyVariantFromString("incr-mf") == GreedyVariant::kMultiFidelity);
  CHECK_THROWS_AS(GreedyVariantFromString("fast"), ConfigError);
}
