// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_COMPRESS_HPP
#define MORFORGE_COMPRESS_HPP

#include <vector>

#include "morforge/common.hpp"
#include "morforge/fe.hpp"

namespace morforge
{

// Modes (columns) orthonormal in the tagged inner product, eigenvalues non-increasing.
struct PodBasis
{
  Matrix modes;
  Vector eigenvalues;
  NormKind kind = NormKind::kTrial;

  int Size() const { return static_cast<int>(modes.cols()); }
};

// Either a fixed mode count or an energy tolerance (retained fraction >= 1 - tol^2).
struct PodTarget
{
  int n = -1;
  double tol = -1.0;

  static PodTarget Fixed(int n) { return {n, -1.0}; }
  static PodTarget Tolerance(double tol) { return {-1, tol}; }
};

// Method of snapshots; snapshots are the columns. Eigenvalues are returned for the full
// (non-truncated) spectrum, modes only for the retained ones.
PodBasis Pod(const Eigen::Ref<const Matrix> &snapshots, const PodTarget &target,
             const InnerProduct &ip);

// Reduced-order basis: orthonormal trial modes on one mesh level.
struct Rob
{
  Matrix basis;
  int mesh_level = 0;
  NormKind kind = NormKind::kTrial;

  int Size() const { return static_cast<int>(basis.cols()); }
  int NumDofs() const { return static_cast<int>(basis.rows()); }
};

// Empirical test space carried between greedy iterations.
struct TestSpaceState
{
  Matrix modes;
  Vector eigenvalues;

  int Size() const { return static_cast<int>(modes.cols()); }
};

// POD of {sqrt(lambda_i) psi_i} together with the new snapshots, truncated to m_new modes.
TestSpaceState HapodUpdate(const TestSpaceState &state, const Eigen::Ref<const Matrix> &snapshots,
                           int m_new, const InnerProduct &ip);

// Twice-iterated Gram-Schmidt; appends when the remainder keeps at least 1e-8 of the norm.
bool AppendToRob(Rob &rob, const Eigen::Ref<const Vector> &u, const InnerProduct &ip);

// Orthonormality defect max |Z^T M Z - I|.
double OrthonormalityDefect(const Eigen::Ref<const Matrix> &modes, const InnerProduct &ip);

struct StrongGreedyResult
{
  std::vector<int> indices;
  // max_errors[k]: max relative projection error after k selections (k = 0..indices.size()).
  std::vector<double> max_errors;
  Matrix basis;
};

// n < 0 means unbounded; tol < 0 disables the tolerance stop.
StrongGreedyResult StrongGreedy(const Eigen::Ref<const Matrix> &snapshots, int n, double tol,
                                const InnerProduct &ip);

// Relative projection errors ||u - Pi_Z u|| / ||u|| of every column (0 for zero columns).
Vector RelativeProjectionErrors(const Eigen::Ref<const Matrix> &snapshots,
                                const Eigen::Ref<const Matrix> &basis, const InnerProduct &ip);

// sum_k dt_k ||Pi_{Z perp} u^k||^2 / sum_k dt_k ||u^k||^2 (0 for a zero trajectory).
double TimeWeightedProjectionError(const Rob &rob, const Eigen::Ref<const Matrix> &trajectory,
                                   const std::vector<double> &dt, const InnerProduct &ip);

// Appends the fewest POD modes of the complements so that the time-weighted relative squared
// projection error drops to tol^2; returns the number of modes added.
int NestedSpaceUpdate(Rob &rob, const Eigen::Ref<const Matrix> &trajectory,
                      const std::vector<double> &dt, double tol, const InnerProduct &ip);

struct PodStrongGreedyResult
{
  std::vector<int> indices;
  std::vector<double> scores;
  Rob rob;
};

PodStrongGreedyResult PodStrongGreedy(const std::vector<Matrix> &trajectories,
                                      const std::vector<double> &dt, int maxit, double tol,
                                      const InnerProduct &ip, int mesh_level = 0);

}  // namespace morforge

#endif  // MORFORGE_COMPRESS_HPP
