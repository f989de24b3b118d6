// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_MESH_HPP
#define MORFORGE_MESH_HPP

#include <array>
#include <span>
#include <vector>

#include "morforge/common.hpp"

namespace morforge
{

//
// Interval mesh with elements D_k = [x_k, x_{k+1}] and point facets F_j = {x_j}. Facet j
// sits on node j; its neighborhood is the set of elements sharing that node (one element for
// the two boundary points, two otherwise).
//
class Mesh
{
public:
  Mesh() = default;

  // Uniform mesh of [a, b] with n_elements cells.
  static Mesh Uniform(int n_elements, double a = 0.0, double b = 1.0, int level = 0);

  // Builds a mesh from sorted, strictly increasing node coordinates.
  static Mesh FromNodes(std::vector<double> nodes, int level = 0);

  // Uniform bisection of every element; parent nodes keep their positions at even indices.
  Mesh Refined() const;

  int NumNodes() const { return static_cast<int>(nodes_.size()); }
  int NumElements() const { return static_cast<int>(nodes_.size()) - 1; }
  int NumFacets() const { return static_cast<int>(nodes_.size()); }
  int Level() const { return level_; }

  const std::vector<double> &Nodes() const { return nodes_; }
  std::array<int, 2> Element(int k) const { return {k, k + 1}; }
  double ElementLength(int k) const { return nodes_[k + 1] - nodes_[k]; }
  // Dual-cell measure of a point facet: half the length of each neighbor element, so the
  // facet measures sum to the domain length.
  double FacetMeasure(int j) const;
  const std::vector<int> &FacetNeighborhood(int j) const { return facet_neighborhood_[j]; }
  double DomainLength() const { return nodes_.back() - nodes_.front(); }

  // Element index containing x (right-closed on the last element).
  int Locate(double x) const;

  // True if every node of this mesh is a node of `fine` (nested hierarchy).
  bool IsAncestorOf(const Mesh &fine, double tol = 1e-12) const;

private:
  std::vector<double> nodes_;
  std::vector<std::vector<int>> facet_neighborhood_;
  int level_ = 0;
};

// Nested hierarchy; level i has n_coarse_elements * 2^i elements.
std::vector<Mesh> BuildMeshHierarchy(int n_coarse_elements, int n_levels);

// Nodal interpolation of a piecewise-linear field from an ancestor mesh onto a finer one.
// Throws ArgumentError when `from` is not an ancestor of `to`.
Vector Prolongate(std::span<const double> nodal_values, const Mesh &from, const Mesh &to);

}  // namespace morforge

#endif  // MORFORGE_MESH_HPP
