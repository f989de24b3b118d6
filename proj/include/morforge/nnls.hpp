// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_NNLS_HPP
#define MORFORGE_NNLS_HPP

#include <vector>

#include "morforge/common.hpp"

namespace morforge
{

// min ||G rho - b||_2 subject to rho >= 0, stopped once ||G rho - b|| <= delta ||b||.
struct NnlsProblem
{
  Matrix G;
  Vector b;
  double delta = 1e-8;
  std::vector<int> warm_start;

  void Validate() const;
};

struct NnlsResult
{
  Vector rho;
  std::vector<int> active_set;
  int ls_solve_count = 0;
  int outer_iterations = 0;
  int indices_added = 0;
  double residual_norm = 0.0;
  // Residual norm at the top of every outer iteration.
  std::vector<double> residual_history;
  bool converged_by_tolerance = false;
};

struct NnlsSettings
{
  // Division guard in the step length.
  double epsilon = 0x1p-1022;
  // Outer iterations allowed per column before giving up.
  int max_outer_factor = 5;
  // Stop when max_{j not in P} w_j <= kkt_tol * ||G^T b||_inf.
  double kkt_tol = 1e-12;
};

NnlsResult NnlsSolve(const NnlsProblem &problem, const NnlsSettings &settings = {});

}  // namespace morforge

#endif  // MORFORGE_NNLS_HPP
