// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace morforge
{

Mesh Mesh::Uniform(int n_elements, double a, double b, int level)
{
  if (n_elements < 1 || !(b > a))
  {
    throw ArgumentError("uniform mesh needs at least one element and a non-empty interval");
  }
  std::vector<double> nodes(n_elements + 1);
  for (int i = 0; i <= n_elements; i++)
  {
    nodes[i] = a + (b - a) * static_cast<double>(i) / n_elements;
  }
  nodes.back() = b;
  return FromNodes(std::move(nodes), level);
}

Mesh Mesh::FromNodes(std::vector<double> nodes, int level)
{
  if (nodes.size() < 2)
  {
    throw ArgumentError("mesh needs at least two nodes");
  }
  for (std::size_t i = 1; i < nodes.size(); i++)
  {
    if (!(nodes[i] > nodes[i - 1]))
    {
      throw ArgumentError("mesh nodes must be strictly increasing (zero-length element at " +
                          std::to_string(i - 1) + ")");
    }
  }
  if (level < 0)
  {
    throw ArgumentError("mesh level must be non-negative");
  }
  Mesh mesh;
  mesh.nodes_ = std::move(nodes);
  mesh.level_ = level;
  const int n_el = mesh.NumElements();
  mesh.facet_neighborhood_.resize(mesh.nodes_.size());
  for (int j = 0; j < mesh.NumFacets(); j++)
  {
    if (j > 0)
    {
      mesh.facet_neighborhood_[j].push_back(j - 1);
    }
    if (j < n_el)
    {
      mesh.facet_neighborhood_[j].push_back(j);
    }
  }
  return mesh;
}

Mesh Mesh::Refined() const
{
  std::vector<double> fine;
  fine.reserve(2 * nodes_.size() - 1);
  for (int k = 0; k < NumElements(); k++)
  {
    fine.push_back(nodes_[k]);
    fine.push_back(0.5 * (nodes_[k] + nodes_[k + 1]));
  }
  fine.push_back(nodes_.back());
  return FromNodes(std::move(fine), level_ + 1);
}

double Mesh::FacetMeasure(int j) const
{
  double s = 0.0;
  for (int k : facet_neighborhood_[j])
  {
    s += 0.5 * ElementLength(k);
  }
  return s;
}

int Mesh::Locate(double x) const
{
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  int k = static_cast<int>(it - nodes_.begin()) - 1;
  return std::clamp(k, 0, NumElements() - 1);
}

bool Mesh::IsAncestorOf(const Mesh &fine, double tol) const
{
  const double scale = tol * std::max(1.0, DomainLength());
  for (double x : nodes_)
  {
    auto it = std::lower_bound(fine.nodes_.begin(), fine.nodes_.end(), x - scale);
    if (it == fine.nodes_.end() || std::abs(*it - x) > scale)
    {
      return false;
    }
  }
  return true;
}

std::vector<Mesh> BuildMeshHierarchy(int n_coarse_elements, int n_levels)
{
  if (n_coarse_elements < 2)
  {
    throw ArgumentError("mesh hierarchy: need at least 2 coarse elements");
  }
  if (n_levels < 1)
  {
    throw ArgumentError("mesh hierarchy: need at least one level");
  }
  std::vector<Mesh> out;
  out.reserve(n_levels);
  out.push_back(Mesh::Uniform(n_coarse_elements, 0.0, 1.0, 0));
  for (int i = 1; i < n_levels; i++)
  {
    out.push_back(out.back().Refined());
  }
  return out;
}

Vector Prolongate(std::span<const double> nodal_values, const Mesh &from, const Mesh &to)
{
  if (static_cast<int>(nodal_values.size()) != from.NumNodes())
  {
    throw DimensionError("prolongate: field has " + std::to_string(nodal_values.size()) +
                         " nodal values, mesh has " + std::to_string(from.NumNodes()));
  }
  if (!from.IsAncestorOf(to))
  {
    throw ArgumentError("prolongate: source mesh is not an ancestor of the target mesh");
  }
  const auto &xc = from.Nodes();
  Vector out(to.NumNodes());
  for (int i = 0; i < to.NumNodes(); i++)
  {
    const double x = to.Nodes()[i];
    const int k = from.Locate(x);
    const double t = (x - xc[k]) / (xc[k + 1] - xc[k]);
    out[i] = (1.0 - t) * nodal_values[k] + t * nodal_values[k + 1];
  }
  return out;
}

}  // namespace morforge
