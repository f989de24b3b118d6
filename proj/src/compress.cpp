// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/compress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace morforge
{

namespace
{

constexpr double kRankCutoff = 1e-12;
constexpr double kDeflation = 1e-8;

void FixSign(Eigen::Ref<Vector> v)
{
  Eigen::Index i = 0;
  v.cwiseAbs().maxCoeff(&i);
  if (v[i] < 0.0)
  {
    v = -v;
  }
}

// Orthogonalizes v twice against the first `count` columns of z; returns the remainder.
Vector Deflate(const Eigen::Ref<const Matrix> &z, const Eigen::Ref<const Vector> &v,
               const InnerProduct &ip)
{
  Vector r = v;
  if (z.cols() == 0)
  {
    return r;
  }
  for (int pass = 0; pass < 2; pass++)
  {
    const Vector c = z.transpose() * ip.Apply(r);
    r -= z * c;
  }
  return r;
}

}  // namespace

PodBasis Pod(const Eigen::Ref<const Matrix> &snapshots, const PodTarget &target,
             const InnerProduct &ip)
{
  if (snapshots.cols() == 0)
  {
    throw ArgumentError("pod: empty snapshot set");
  }
  if (snapshots.rows() != ip.Size())
  {
    throw DimensionError("pod: snapshot length does not match the inner product");
  }
  if (target.n < 0 && !(target.tol >= 0.0))
  {
    throw ArgumentError("pod: target needs a mode count or a tolerance");
  }
  PodBasis out;
  out.kind = ip.Kind();
  const Matrix c = ip.Gramian(snapshots, snapshots);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (c + c.transpose()));
  const int ns = static_cast<int>(snapshots.cols());
  Vector lambda = eig.eigenvalues().reverse().cwiseMax(0.0);
  Matrix v = eig.eigenvectors().rowwise().reverse();
  out.eigenvalues = lambda;
  out.modes.resize(snapshots.rows(), 0);
  if (ns == 0 || lambda[0] <= 0.0)
  {
    return out;
  }
  int rank = 0;
  while (rank < ns && lambda[rank] >= kRankCutoff * lambda[0])
  {
    rank++;
  }
  int n = rank;
  if (target.n >= 0)
  {
    n = std::min(target.n, rank);
  }
  else
  {
    const double total = lambda.sum();
    double kept = 0.0;
    n = 0;
    while (n < rank && kept < (1.0 - target.tol * target.tol) * total)
    {
      kept += lambda[n];
      n++;
    }
  }
  out.modes.resize(snapshots.rows(), n);
  for (int i = 0; i < n; i++)
  {
    Vector z = snapshots * v.col(i) / std::sqrt(lambda[i]);
    z = Deflate(out.modes.leftCols(i), z, ip);
    z /= ip.Norm(z);
    FixSign(z);
    out.modes.col(i) = z;
  }
  return out;
}

TestSpaceState HapodUpdate(const TestSpaceState &state, const Eigen::Ref<const Matrix> &snapshots,
                           int m_new, const InnerProduct &ip)
{
  if (m_new < 1)
  {
    throw ArgumentError("hapod_update: m_new must be at least 1");
  }
  const int m = state.Size();
  Matrix pooled(ip.Size(), m + snapshots.cols());
  for (int i = 0; i < m; i++)
  {
    pooled.col(i) = std::sqrt(std::max(state.eigenvalues[i], 0.0)) * state.modes.col(i);
  }
  pooled.rightCols(snapshots.cols()) = snapshots;
  TestSpaceState out;
  if (pooled.cols() == 0)
  {
    out.modes.resize(ip.Size(), 0);
    return out;
  }
  PodBasis pod = Pod(pooled, PodTarget::Fixed(m_new), ip);
  out.modes = std::move(pod.modes);
  out.eigenvalues = pod.eigenvalues.head(out.modes.cols());
  return out;
}

bool AppendToRob(Rob &rob, const Eigen::Ref<const Vector> &u, const InnerProduct &ip)
{
  if (u.size() != ip.Size() || (rob.Size() > 0 && rob.NumDofs() != u.size()))
  {
    throw DimensionError("append_to_rob: field length does not match the basis");
  }
  const double norm = ip.Norm(u);
  if (norm == 0.0)
  {
    return false;
  }
  Vector r = Deflate(rob.basis, u, ip);
  const double rn = ip.Norm(r);
  if (rn < kDeflation * norm)
  {
    return false;
  }
  r /= rn;
  r = Deflate(rob.basis, r, ip);
  r /= ip.Norm(r);
  rob.basis.conservativeResize(u.size(), rob.Size() + 1);
  rob.basis.col(rob.Size() - 1) = r;
  rob.kind = ip.Kind();
  return true;
}

double OrthonormalityDefect(const Eigen::Ref<const Matrix> &modes, const InnerProduct &ip)
{
  if (modes.cols() == 0)
  {
    return 0.0;
  }
  const Matrix g = ip.Gramian(modes, modes);
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

Vector RelativeProjectionErrors(const Eigen::Ref<const Matrix> &snapshots,
                                const Eigen::Ref<const Matrix> &basis, const InnerProduct &ip)
{
  Vector err(snapshots.cols());
  for (Eigen::Index i = 0; i < snapshots.cols(); i++)
  {
    const double norm = ip.Norm(snapshots.col(i));
    err[i] = norm > 0.0 ? ip.Norm(Deflate(basis, snapshots.col(i), ip)) / norm : 0.0;
  }
  return err;
}

StrongGreedyResult StrongGreedy(const Eigen::Ref<const Matrix> &snapshots, int n, double tol,
                                const InnerProduct &ip)
{
  if (snapshots.cols() == 0)
  {
    throw ArgumentError("strong_greedy: empty snapshot set");
  }
  const int ns = static_cast<int>(snapshots.cols());
  StrongGreedyResult out;
  out.basis.resize(snapshots.rows(), 0);
  Vector norms(ns);
  for (int i = 0; i < ns; i++)
  {
    norms[i] = ip.Norm(snapshots.col(i));
  }
  Matrix residuals = snapshots;
  auto max_rel = [&](const Vector &abs_err)
  {
    double m = 0.0;
    for (int i = 0; i < ns; i++)
    {
      if (norms[i] > 0.0)
      {
        m = std::max(m, abs_err[i] / norms[i]);
      }
    }
    return m;
  };
  Vector abs_err = norms;
  out.max_errors.push_back(max_rel(abs_err));
  const int limit = n < 0 ? ns : std::min(n, ns);
  while (static_cast<int>(out.indices.size()) < limit)
  {
    if (tol >= 0.0 && out.max_errors.back() <= tol)
    {
      break;
    }
    int winner = 0;
    for (int i = 1; i < ns; i++)
    {
      if (abs_err[i] > abs_err[winner])
      {
        winner = i;
      }
    }
    if (norms[winner] == 0.0 || abs_err[winner] < kDeflation * norms[winner])
    {
      break;
    }
    Vector z = residuals.col(winner) / abs_err[winner];
    z = Deflate(out.basis, z, ip);
    z /= ip.Norm(z);
    out.basis.conservativeResize(Eigen::NoChange, out.basis.cols() + 1);
    out.basis.col(out.basis.cols() - 1) = z;
    out.indices.push_back(winner);
    const Vector mz = ip.Apply(z);
    for (int i = 0; i < ns; i++)
    {
      residuals.col(i) -= z * mz.dot(residuals.col(i));
      abs_err[i] = ip.Norm(residuals.col(i));
    }
    out.max_errors.push_back(max_rel(abs_err));
  }
  return out;
}

double TimeWeightedProjectionError(const Rob &rob, const Eigen::Ref<const Matrix> &trajectory,
                                   const std::vector<double> &dt, const InnerProduct &ip)
{
  if (static_cast<Eigen::Index>(dt.size()) != trajectory.cols())
  {
    throw DimensionError("time-weighted projection error: one weight per state required");
  }
  double num = 0.0, den = 0.0;
  for (Eigen::Index k = 0; k < trajectory.cols(); k++)
  {
    const double e = ip.Norm(Deflate(rob.basis, trajectory.col(k), ip));
    const double u = ip.Norm(trajectory.col(k));
    num += dt[k] * e * e;
    den += dt[k] * u * u;
  }
  return den > 0.0 ? num / den : 0.0;
}

int NestedSpaceUpdate(Rob &rob, const Eigen::Ref<const Matrix> &trajectory,
                      const std::vector<double> &dt, double tol, const InnerProduct &ip)
{
  if (static_cast<Eigen::Index>(dt.size()) != trajectory.cols())
  {
    throw DimensionError("nested_space_update: one weight per state required");
  }
  if (rob.Size() == 0)
  {
    rob.basis.resize(trajectory.rows(), 0);
  }
  else if (rob.NumDofs() != trajectory.rows())
  {
    throw DimensionError("nested_space_update: trajectory does not match the basis");
  }
  Matrix complement(trajectory.rows(), trajectory.cols());
  double energy = 0.0, missing = 0.0;
  for (Eigen::Index k = 0; k < trajectory.cols(); k++)
  {
    const double w = std::sqrt(dt[k]);
    complement.col(k) = w * Deflate(rob.basis, trajectory.col(k), ip);
    const double u = ip.Norm(trajectory.col(k));
    energy += dt[k] * u * u;
    const double e = ip.Norm(complement.col(k));
    missing += e * e;
  }
  const double budget = tol * tol * energy;
  if (missing <= budget || trajectory.cols() == 0)
  {
    return 0;
  }
  const PodBasis pod = Pod(complement, PodTarget::Fixed(static_cast<int>(trajectory.cols())), ip);
  // Residual after j modes is the tail sum of the complement spectrum.
  double tail = pod.eigenvalues.sum();
  int added = 0;
  for (int j = 0; j < pod.Size() && tail > budget; j++)
  {
    if (AppendToRob(rob, pod.modes.col(j), ip))
    {
      added++;
    }
    tail -= pod.eigenvalues[j];
  }
  return added;
}

PodStrongGreedyResult PodStrongGreedy(const std::vector<Matrix> &trajectories,
                                      const std::vector<double> &dt, int maxit, double tol,
                                      const InnerProduct &ip, int mesh_level)
{
  if (trajectories.empty())
  {
    throw ArgumentError("pod_strong_greedy: no trajectories");
  }
  for (const auto &t : trajectories)
  {
    if (t.cols() != trajectories.front().cols() || t.rows() != ip.Size())
    {
      throw DimensionError("pod_strong_greedy: trajectories must share the time grid and mesh");
    }
  }
  PodStrongGreedyResult out;
  out.rob.basis.resize(ip.Size(), 0);
  out.rob.mesh_level = mesh_level;
  out.rob.kind = ip.Kind();
  const int nt = static_cast<int>(trajectories.size());
  std::vector<bool> taken(nt, false);
  for (int it = 0; it < std::min(maxit, nt); it++)
  {
    int winner = -1;
    double best = -1.0;
    for (int i = 0; i < nt; i++)
    {
      if (taken[i])
      {
        continue;
      }
      double score = 0.0;
      for (Eigen::Index k = 0; k < trajectories[i].cols(); k++)
      {
        const double e = ip.Norm(Deflate(out.rob.basis, trajectories[i].col(k), ip));
        score += e * e;
      }
      if (score > best)
      {
        best = score;
        winner = i;
      }
    }
    taken[winner] = true;
    out.indices.push_back(winner);
    out.scores.push_back(best);
    NestedSpaceUpdate(out.rob, trajectories[winner], dt, tol, ip);
  }
  return out;
}

}  // namespace morforge
