// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_QUAD_RULE_HPP
#define MORFORGE_QUAD_RULE_HPP

#include <vector>

#include "morforge/common.hpp"

namespace morforge
{

//
// Non-negative element and facet weights of an empirical quadrature rule. The active set
// indexes the concatenated vector [element weights, facet weights] and lists exactly the
// non-zero entries; it seeds the next NNLS solve when warm starting.
//
struct QuadRule
{
  Vector elem_weights;
  Vector facet_weights;
  std::vector<int> active_set;

  static QuadRule AllOnes(int n_elements, int n_facets);
  // Splits a concatenated weight vector; the active set is recomputed from the support.
  static QuadRule FromConcatenated(const Vector &rho, int n_elements);

  int NumElements() const { return static_cast<int>(elem_weights.size()); }
  int NumFacets() const { return static_cast<int>(facet_weights.size()); }
  Vector Concatenated() const;
  int NnzElements() const;
  int NnzFacets() const;

  // Throws ArgumentError if a weight is negative/non-finite or the active set disagrees with
  // the support.
  void Validate() const;
};

}  // namespace morforge

#endif  // MORFORGE_QUAD_RULE_HPP
