// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/fe.hpp"

#include <algorithm>
#include <cmath>

namespace morforge
{

DofMap::DofMap(int num_nodes, std::vector<int> constrained_nodes)
  : node_to_dof_(num_nodes, 0), constrained_(std::move(constrained_nodes))
{
  std::sort(constrained_.begin(), constrained_.end());
  constrained_.erase(std::unique(constrained_.begin(), constrained_.end()), constrained_.end());
  for (int node : constrained_)
  {
    if (node < 0 || node >= num_nodes)
    {
      throw ArgumentError("constrained node index out of range");
    }
    node_to_dof_[node] = -1;
  }
  for (int i = 0; i < num_nodes; i++)
  {
    if (node_to_dof_[i] >= 0)
    {
      node_to_dof_[i] = static_cast<int>(dof_to_node_.size());
      dof_to_node_.push_back(i);
    }
  }
}

namespace
{

template <typename LocalMatrix>
SparseMatrix AssembleP1(const Mesh &mesh, const DofMap &dofs, LocalMatrix local)
{
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * mesh.NumElements());
  for (int k = 0; k < mesh.NumElements(); k++)
  {
    const auto a = local(mesh.ElementLength(k));
    const auto nodes = mesh.Element(k);
    for (int i = 0; i < 2; i++)
    {
      const int di = dofs.Dof(nodes[i]);
      if (di < 0)
      {
        continue;
      }
      for (int j = 0; j < 2; j++)
      {
        const int dj = dofs.Dof(nodes[j]);
        if (dj >= 0)
        {
          triplets.emplace_back(di, dj, a[i][j]);
        }
      }
    }
  }
  SparseMatrix out(dofs.NumDofs(), dofs.NumDofs());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

SparseMatrix AssembleMass(const Mesh &mesh, const DofMap &dofs)
{
  return AssembleP1(mesh, dofs, [](double h) {
    return std::array<std::array<double, 2>, 2>{{{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}}};
  });
}

SparseMatrix AssembleStiffness(const Mesh &mesh, const DofMap &dofs)
{
  return AssembleP1(mesh, dofs, [](double h) {
    return std::array<std::array<double, 2>, 2>{{{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}}};
  });
}

std::string ToString(NormKind kind)
{
  switch (kind)
  {
    case NormKind::kTrial:
      return "trial";
    case NormKind::kTest:
      return "test";
    case NormKind::kEuclidean:
      return "euclidean";
  }
  return "unknown";
}

NormKind NormKindFromString(const std::string &s)
{
  if (s == "trial")
  {
    return NormKind::kTrial;
  }
  if (s == "test")
  {
    return NormKind::kTest;
  }
  if (s == "euclidean")
  {
    return NormKind::kEuclidean;
  }
  throw ArgumentError("unknown norm kind '" + s + "'");
}

InnerProduct::InnerProduct(SparseMatrix gram, NormKind kind) : gram_(std::move(gram)), kind_(kind)
{
  if (gram_.rows() != gram_.cols())
  {
    throw DimensionError("inner product operator must be square");
  }
  gram_.makeCompressed();
  llt_ = std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>(gram_);
  if (llt_->info() != Eigen::Success)
  {
    throw ConfigError("inner product operator is not symmetric positive definite");
  }
}

InnerProduct InnerProduct::Euclidean(int n)
{
  SparseMatrix id(n, n);
  id.setIdentity();
  InnerProduct ip(std::move(id), NormKind::kEuclidean);
  ip.identity_ = true;
  return ip;
}

double InnerProduct::Dot(const Eigen::Ref<const Vector> &a, const Eigen::Ref<const Vector> &b) const
{
  if (identity_)
  {
    return a.dot(b);
  }
  return a.dot(gram_ * b);
}

double InnerProduct::Norm(const Eigen::Ref<const Vector> &a) const
{
  return std::sqrt(std::max(0.0, Dot(a, a)));
}

Vector InnerProduct::Apply(const Eigen::Ref<const Vector> &v) const
{
  if (identity_)
  {
    return v;
  }
  return gram_ * v;
}

Matrix InnerProduct::ApplyColumns(const Eigen::Ref<const Matrix> &v) const
{
  if (identity_)
  {
    return v;
  }
  return gram_ * v;
}

Matrix InnerProduct::Gramian(const Eigen::Ref<const Matrix> &a,
                             const Eigen::Ref<const Matrix> &b) const
{
  return a.transpose() * ApplyColumns(b);
}

Vector InnerProduct::Solve(const Eigen::Ref<const Vector> &functional) const
{
  if (functional.size() != Size())
  {
    throw DimensionError("Riesz solve: functional has length " +
                         std::to_string(functional.size()) + ", expected " +
                         std::to_string(Size()));
  }
  if (identity_)
  {
    return functional;
  }
  return llt_->solve(functional);
}

Matrix InnerProduct::SolveColumns(const Eigen::Ref<const Matrix> &functionals) const
{
  if (functionals.rows() != Size())
  {
    throw DimensionError("Riesz solve: functional block has wrong row count");
  }
  if (identity_)
  {
    return functionals;
  }
  return llt_->solve(functionals);
}

double InnerProduct::DualNorm(const Eigen::Ref<const Vector> &functional) const
{
  const Vector psi = Solve(functional);
  return std::sqrt(std::max(0.0, functional.dot(psi)));
}

FeDiscretization::FeDiscretization(Mesh mesh, std::vector<int> constrained_nodes, ParamBox box)
  : mesh_(std::move(mesh)), dofs_(mesh_.NumNodes(), std::move(constrained_nodes)),
    box_(std::move(box))
{
  const SparseMatrix mass = AssembleMass(mesh_, dofs_);
  const SparseMatrix stiff = AssembleStiffness(mesh_, dofs_);
  trial_ = std::make_shared<const InnerProduct>(mass, NormKind::kTrial);
  test_ = std::make_shared<const InnerProduct>(SparseMatrix(stiff + mass), NormKind::kTest);
}

const InnerProduct &FeDiscretization::GetInnerProduct(NormKind kind) const
{
  switch (kind)
  {
    case NormKind::kTrial:
      return *trial_;
    case NormKind::kTest:
      return *test_;
    case NormKind::kEuclidean:
      break;
  }
  throw ArgumentError("model inner products are trial or test only");
}

std::array<int, 2> FeDiscretization::ElementDofs(int k) const
{
  const auto nodes = mesh_.Element(k);
  return {dofs_.Dof(nodes[0]), dofs_.Dof(nodes[1])};
}

void FeDiscretization::RequireSize(const Eigen::Ref<const Vector> &w, const char *what) const
{
  if (w.size() != NumDofs())
  {
    throw DimensionError(std::string(what) + ": vector has length " + std::to_string(w.size()) +
                         ", model has " + std::to_string(NumDofs()) + " free dofs");
  }
}

HfField RieszSolve(const FeDiscretization &model, const Eigen::Ref<const Vector> &functional,
                   NormKind norm)
{
  return HfField{model.GetInnerProduct(norm).Solve(functional), model.MeshLevel()};
}

void FeDiscretization::RequireRule(const QuadRule *weights, const char *what) const
{
  if (weights && (weights->NumElements() != NumElements() || weights->NumFacets() != NumFacets()))
  {
    throw DimensionError(std::string(what) + ": quadrature rule sized for a different mesh");
  }
}

}  // namespace morforge
