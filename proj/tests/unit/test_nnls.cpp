// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <Eigen/QR>

#include "helpers.hpp"
#include "morforge/nnls.hpp"

using namespace morforge;
using Catch::Matchers::WithinAbs;

namespace
{

// Exact NNLS optimum by enumerating supports of size <= rows.
double BruteForceNnls(const Matrix &g, const Vector &b)
{
  const int n = static_cast<int>(g.cols());
  double best = b.norm();
  for (unsigned mask = 1; mask < (1u << n); mask++)
  {
    std::vector<int> s;
    for (int j = 0; j < n; j++)
    {
      if (mask & (1u << j))
      {
        s.push_back(j);
      }
    }
    if (static_cast<int>(s.size()) > g.rows())
    {
      continue;
    }
    Matrix a(g.rows(), s.size());
    for (std::size_t i = 0; i < s.size(); i++)
    {
      a.col(i) = g.col(s[i]);
    }
    const Vector x = a.colPivHouseholderQr().solve(b);
    if (x.minCoeff() < 0.0)
    {
      continue;
    }
    best = std::min(best, (a * x - b).norm());
  }
  return best;
}

// Rows of an EQ-like system: non-negative column scales times random tests.
Matrix EqLikeRows(int rows, int cols, std::mt19937_64 &gen)
{
  Matrix g = testing::RandomMatrix(rows, cols, gen);
  g.row(0).setOnes();
  return g;
}

}  // namespace

TEST_CASE("identity system returns the positive part", "[nnls]")
{
  std::mt19937_64 gen(1);
  NnlsProblem p;
  p.G = Matrix::Identity(8, 8);
  p.b = testing::RandomVector(8, gen);
  p.delta = 1e-14;
  const NnlsResult r = NnlsSolve(p);
  for (int i = 0; i < 8; i++)
  {
    CHECK_THAT(r.rho[i], WithinAbs(std::max(p.b[i], 0.0), 1e-14));
  }
  CHECK_THAT(r.residual_norm, WithinAbs(p.b.cwiseMin(0.0).norm(), 1e-14));
}

TEST_CASE("feasible right-hand side reaches the tolerance", "[nnls]")
{
  std::mt19937_64 gen(2);
  for (double delta : {1e-2, 1e-4, 1e-8})
  {
    NnlsProblem p;
    p.G = EqLikeRows(30, 60, gen);
    p.b = p.G * Vector::Ones(60);
    p.delta = delta;
    const NnlsResult r = NnlsSolve(p);
    CHECK(r.converged_by_tolerance);
    CHECK(r.rho.minCoeff() >= 0.0);
    CHECK((p.G * r.rho - p.b).norm() <= delta * p.b.norm());
    CHECK(static_cast<int>(r.active_set.size()) <= 30);
    for (int j : r.active_set)
    {
      CHECK(r.rho[j] > 0.0);
    }
    CHECK(static_cast<int>(r.active_set.size()) == (r.rho.array() > 0.0).count());
  }
}

TEST_CASE("nnls reaches the brute-force optimum", "[nnls]")
{
  for (int seed = 0; seed < 50; seed++)
  {
    std::mt19937_64 gen(1000 + seed);
    NnlsProblem p;
    p.G = testing::RandomMatrix(6, 12, gen);
    p.b = testing::RandomVector(6, gen);
    p.delta = 1e-15;
    const NnlsResult r = NnlsSolve(p);
    const double oracle = BruteForceNnls(p.G, p.b);
    CHECK_THAT(r.residual_norm, WithinAbs(oracle, 1e-10 * (1.0 + p.b.norm())));
    CHECK(r.rho.minCoeff() >= 0.0);
  }
}

TEST_CASE("nnls solution satisfies the KKT conditions", "[nnls]")
{
  std::mt19937_64 gen(3);
  for (int t = 0; t < 10; t++)
  {
    NnlsProblem p;
    p.G = testing::RandomMatrix(20, 10, gen);
    p.b = testing::RandomVector(20, gen);
    p.delta = 1e-15;
    const NnlsResult r = NnlsSolve(p);
    const Vector w = p.G.transpose() * (p.b - p.G * r.rho);
    const double scale = (p.G.transpose() * p.b).cwiseAbs().maxCoeff();
    for (int j = 0; j < 10; j++)
    {
      if (r.rho[j] > 0.0)
      {
        CHECK(std::abs(w[j]) <= 1e-10 * scale);
      }
      else
      {
        CHECK(w[j] <= 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("warm starts on nested systems save least-squares solves", "[nnls]")
{
  std::mt19937_64 gen(4);
  const int cols = 80;
  Matrix g = EqLikeRows(4, cols, gen);
  std::vector<int> active;
  int warm_total = 0, cold_total = 0;
  for (int step = 0; step < 20; step++)
  {
    Matrix grown(g.rows() + 2, cols);
    grown << g, testing::RandomMatrix(2, cols, gen);
    g = grown;
    NnlsProblem p;
    p.G = g;
    p.b = g * Vector::Ones(cols);
    p.delta = 1e-4;
    const NnlsResult cold = NnlsSolve(p);
    p.warm_start = active;
    const NnlsResult warm = NnlsSolve(p);
    CHECK(warm.converged_by_tolerance);
    CHECK(warm.residual_norm <= p.delta * p.b.norm());
    CHECK(warm.rho.minCoeff() >= 0.0);
    warm_total += warm.ls_solve_count;
    cold_total += cold.ls_solve_count;
    active = warm.active_set;
  }
  CHECK(warm_total <= cold_total);
}

TEST_CASE("zero right-hand side and monotone residuals", "[nnls]")
{
  std::mt19937_64 gen(5);
  NnlsProblem z;
  z.G = testing::RandomMatrix(5, 7, gen);
  z.b = Vector::Zero(5);
  const NnlsResult rz = NnlsSolve(z);
  CHECK(rz.rho.isZero());
  CHECK(rz.active_set.empty());
  CHECK(rz.ls_solve_count == 0);

  NnlsProblem p;
  p.G = EqLikeRows(25, 40, gen);
  p.b = testing::RandomVector(25, gen);
  p.delta = 1e-12;
  const NnlsResult r = NnlsSolve(p);
  for (std::size_t i = 1; i < r.residual_history.size(); i++)
  {
    CHECK(r.residual_history[i] <= r.residual_history[i - 1] * (1 + 1e-12));
  }
  CHECK(r.ls_solve_count >= r.outer_iterations);
}

TEST_CASE("nnls rejects malformed problems", "[nnls]")
{
  NnlsProblem p;
  p.G = Matrix::Identity(3, 3);
  p.b = Vector::Ones(2);
  CHECK_THROWS_AS(NnlsSolve(p), DimensionError);
  p.b = Vector::Ones(3);
  p.delta = 0.0;
  CHECK_THROWS_AS(NnlsSolve(p), ArgumentError);
  p.delta = 1e-3;
  p.warm_start = {0, 3};
  CHECK_THROWS_AS(NnlsSolve(p), ArgumentError);
  p.warm_start = {1, 1};
  CHECK_THROWS_AS(NnlsSolve(p), ArgumentError);
}
