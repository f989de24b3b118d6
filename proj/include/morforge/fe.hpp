// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_FE_HPP
#define MORFORGE_FE_HPP

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "morforge/common.hpp"
#include "morforge/mesh.hpp"
#include "morforge/quad_rule.hpp"

namespace morforge
{

// Two-point Gauss rule on the reference interval [0, 1].
struct GaussRule
{
  static constexpr int kPoints = 2;
  static constexpr std::array<double, 2> points = {0.21132486540518711775,
                                                   0.78867513459481288225};
  static constexpr std::array<double, 2> weights = {0.5, 0.5};
};

// Maps mesh nodes onto free degrees of freedom; constrained (Dirichlet) nodes map to -1.
class DofMap
{
public:
  DofMap() = default;
  DofMap(int num_nodes, std::vector<int> constrained_nodes);

  int NumNodes() const { return static_cast<int>(node_to_dof_.size()); }
  int NumDofs() const { return static_cast<int>(dof_to_node_.size()); }
  int Dof(int node) const { return node_to_dof_[node]; }
  int Node(int dof) const { return dof_to_node_[dof]; }
  const std::vector<int> &ConstrainedNodes() const { return constrained_; }
  const std::vector<int> &FreeNodes() const { return dof_to_node_; }

private:
  std::vector<int> node_to_dof_, dof_to_node_, constrained_;
};

// P1 mass and stiffness operators restricted to free dofs.
SparseMatrix AssembleMass(const Mesh &mesh, const DofMap &dofs);
SparseMatrix AssembleStiffness(const Mesh &mesh, const DofMap &dofs);

enum class NormKind
{
  kTrial,  // L2 mass operator
  kTest,   // H1-type stiffness + mass operator
  kEuclidean
};

std::string ToString(NormKind kind);
NormKind NormKindFromString(const std::string &s);

//
// Symmetric positive-definite inner product (u, v) = u^T M v with a cached sparse Cholesky
// factorization for Riesz solves M psi = f.
//
class InnerProduct
{
public:
  InnerProduct(SparseMatrix gram, NormKind kind);
  static InnerProduct Euclidean(int n);

  int Size() const { return static_cast<int>(gram_.rows()); }
  NormKind Kind() const { return kind_; }
  const SparseMatrix &Gram() const { return gram_; }

  double Dot(const Eigen::Ref<const Vector> &a, const Eigen::Ref<const Vector> &b) const;
  double Norm(const Eigen::Ref<const Vector> &a) const;
  Vector Apply(const Eigen::Ref<const Vector> &v) const;
  Matrix ApplyColumns(const Eigen::Ref<const Matrix> &v) const;
  // A^T M B.
  Matrix Gramian(const Eigen::Ref<const Matrix> &a, const Eigen::Ref<const Matrix> &b) const;

  Vector Solve(const Eigen::Ref<const Vector> &functional) const;
  Matrix SolveColumns(const Eigen::Ref<const Matrix> &functionals) const;
  // sqrt(f^T M^{-1} f).
  double DualNorm(const Eigen::Ref<const Vector> &functional) const;

private:
  SparseMatrix gram_;
  NormKind kind_;
  bool identity_ = false;
  std::shared_ptr<Eigen::SimplicialLLT<SparseMatrix>> llt_;
};

//
// Shared P1 discretization of an interval: mesh, free-dof layout, parameter box and the two
// parameter-independent inner products. Concrete HF models derive from this.
//
class FeDiscretization
{
public:
  FeDiscretization(Mesh mesh, std::vector<int> constrained_nodes, ParamBox box);
  virtual ~FeDiscretization() = default;

  const Mesh &GetMesh() const { return mesh_; }
  const DofMap &Dofs() const { return dofs_; }
  int NumDofs() const { return dofs_.NumDofs(); }
  int NumElements() const { return mesh_.NumElements(); }
  int NumFacets() const { return mesh_.NumFacets(); }
  int MeshLevel() const { return mesh_.Level(); }
  const ParamBox &Box() const { return box_; }

  const InnerProduct &TrialInnerProduct() const { return *trial_; }
  const InnerProduct &TestInnerProduct() const { return *test_; }
  const InnerProduct &GetInnerProduct(NormKind kind) const;

  // Free-dof indices of element k's two nodes (-1 for constrained nodes).
  std::array<int, 2> ElementDofs(int k) const;
  int FacetDof(int j) const { return dofs_.Dof(j); }

  void RequireSize(const Eigen::Ref<const Vector> &w, const char *what) const;
  // Null rules are accepted (unit weights).
  void RequireRule(const QuadRule *weights, const char *what) const;

private:
  Mesh mesh_;
  DofMap dofs_;
  ParamBox box_;
  std::shared_ptr<const InnerProduct> trial_, test_;
};

// Riesz representer psi with M psi = functional in the selected inner product.
HfField RieszSolve(const FeDiscretization &model, const Eigen::Ref<const Vector> &functional,
                   NormKind norm);

}  // namespace morforge

#endif  // MORFORGE_FE_HPP
