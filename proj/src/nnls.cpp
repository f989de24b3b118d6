// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/QR>

namespace morforge
{

void NnlsProblem::Validate() const
{
  if (G.rows() != b.size())
  {
    throw DimensionError("nnls: G has " + std::to_string(G.rows()) + " rows but b has " +
                         std::to_string(b.size()) + " entries");
  }
  if (!(delta > 0.0))
  {
    throw ArgumentError("nnls: delta must be positive");
  }
  std::vector<bool> seen(G.cols(), false);
  for (int p : warm_start)
  {
    if (p < 0 || p >= G.cols())
    {
      throw ArgumentError("nnls: warm-start index " + std::to_string(p) + " out of range");
    }
    if (seen[p])
    {
      throw ArgumentError("nnls: duplicate warm-start index " + std::to_string(p));
    }
    seen[p] = true;
  }
}

namespace
{

// Least-squares data reduced to at most N rows: ||G x - b||^2 = ||R x - c||^2 + tail^2.
struct Reduced
{
  Matrix R;
  Vector c;
  double tail2 = 0.0;
};

Reduced Compress(const Matrix &G, const Vector &b)
{
  Reduced out;
  if (G.rows() <= G.cols())
  {
    out.R = G;
    out.c = b;
    return out;
  }
  Eigen::HouseholderQR<Matrix> qr(G);
  const Eigen::Index n = G.cols();
  Matrix q = qr.householderQ() * Matrix::Identity(G.rows(), n);
  out.R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  out.c = q.transpose() * b;
  out.tail2 = (b - q * out.c).squaredNorm();
  return out;
}

Vector SubsetSolve(const Reduced &sys, const std::vector<int> &p)
{
  Matrix a(sys.R.rows(), p.size());
  for (std::size_t i = 0; i < p.size(); i++)
  {
    a.col(i) = sys.R.col(p[i]);
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  return cod.solve(sys.c);
}

}  // namespace

NnlsResult NnlsSolve(const NnlsProblem &problem, const NnlsSettings &settings)
{
  problem.Validate();
  const int n = static_cast<int>(problem.G.cols());
  NnlsResult out;
  out.rho = Vector::Zero(n);
  const double bnorm = problem.b.norm();
  if (bnorm == 0.0 || n == 0)
  {
    out.residual_norm = bnorm;
    out.converged_by_tolerance = true;
    return out;
  }
  const Reduced sys = Compress(problem.G, problem.b);
  auto residual = [&](const Vector &x) {
    return std::sqrt((sys.R * x - sys.c).squaredNorm() + sys.tail2);
  };
  auto gradient = [&](const Vector &x) -> Vector { return sys.R.transpose() * (sys.c - sys.R * x); };

  Vector x = Vector::Zero(n);
  Vector w = gradient(x);
  const double kkt = settings.kkt_tol * std::max(w.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<bool> in_p(n, false);
  std::vector<int> p;

  // Solves on P, then removes variables driven negative until the solution is feasible.
  auto inner = [&]()
  {
    while (true)
    {
      out.ls_solve_count++;
      const Vector zp = SubsetSolve(sys, p);
      Vector z = Vector::Zero(n);
      for (std::size_t i = 0; i < p.size(); i++)
      {
        z[p[i]] = zp[i];
      }
      bool feasible = true;
      for (int j : p)
      {
        if (z[j] < 0.0)
        {
          feasible = false;
          break;
        }
      }
      if (feasible)
      {
        x = z;
        w = gradient(x);
        return;
      }
      double alpha = std::numeric_limits<double>::infinity();
      int istar = -1;
      for (int j : p)
      {
        if (z[j] < 0.0)
        {
          const double a = x[j] / (x[j] - z[j] + settings.epsilon);
          if (a < alpha)
          {
            alpha = a;
            istar = j;
          }
        }
      }
      p.erase(std::find(p.begin(), p.end(), istar));
      in_p[istar] = false;
      x = x - alpha * (x - z);
      x[istar] = 0.0;
      for (int j = 0; j < n; j++)
      {
        if (!in_p[j])
        {
          x[j] = 0.0;
        }
        else
        {
          x[j] = std::max(x[j], 0.0);
        }
      }
    }
  };

  if (!problem.warm_start.empty())
  {
    for (int j : problem.warm_start)
    {
      in_p[j] = true;
      p.push_back(j);
    }
    inner();
  }

  const int max_outer = settings.max_outer_factor * n;
  while (true)
  {
    const double r = residual(x);
    out.residual_history.push_back(r);
    if (static_cast<int>(p.size()) == n || r <= problem.delta * bnorm)
    {
      out.converged_by_tolerance = r <= problem.delta * bnorm;
      break;
    }
    int istar = -1;
    for (int j = 0; j < n; j++)
    {
      if (!in_p[j] && (istar < 0 || w[j] > w[istar]))
      {
        istar = j;
      }
    }
    if (w[istar] <= kkt)
    {
      break;
    }
    if (out.outer_iterations == max_outer)
    {
      throw SolverError("nnls: exceeded " + std::to_string(max_outer) + " outer iterations", x, r);
    }
    out.outer_iterations++;
    out.indices_added++;
    in_p[istar] = true;
    p.push_back(istar);
    inner();
  }

  out.rho = x;
  for (int j = 0; j < n; j++)
  {
    if (!in_p[j])
    {
      out.rho[j] = 0.0;
    }
  }
  for (int j = 0; j < n; j++)
  {
    if (out.rho[j] > 0.0)
    {
      out.active_set.push_back(j);
    }
    else
    {
      out.rho[j] = 0.0;
    }
  }
  out.residual_norm = (problem.G * out.rho - problem.b).norm();
  return out;
}

}  // namespace morforge
