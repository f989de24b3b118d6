// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/quad_rule.hpp"

#include <cmath>

namespace morforge
{

QuadRule QuadRule::AllOnes(int n_elements, int n_facets)
{
  return FromConcatenated(Vector::Ones(n_elements + n_facets), n_elements);
}

QuadRule QuadRule::FromConcatenated(const Vector &rho, int n_elements)
{
  if (n_elements < 0 || n_elements > rho.size())
  {
    throw DimensionError("quadrature rule: element count exceeds weight vector length");
  }
  QuadRule q;
  q.elem_weights = rho.head(n_elements);
  q.facet_weights = rho.tail(rho.size() - n_elements);
  for (int i = 0; i < rho.size(); i++)
  {
    if (rho[i] != 0.0)
    {
      q.active_set.push_back(i);
    }
  }
  return q;
}

Vector QuadRule::Concatenated() const
{
  Vector out(elem_weights.size() + facet_weights.size());
  out << elem_weights, facet_weights;
  return out;
}

int QuadRule::NnzElements() const
{
  return static_cast<int>((elem_weights.array() != 0.0).count());
}

int QuadRule::NnzFacets() const
{
  return static_cast<int>((facet_weights.array() != 0.0).count());
}

void QuadRule::Validate() const
{
  const Vector rho = Concatenated();
  for (int i = 0; i < rho.size(); i++)
  {
    if (!std::isfinite(rho[i]) || rho[i] < 0.0)
    {
      throw ArgumentError("quadrature rule: weight " + std::to_string(i) +
                          " is negative or not finite");
    }
  }
  std::size_t expected = 0;
  for (int i = 0; i < rho.size(); i++)
  {
    if (rho[i] != 0.0)
    {
      if (expected >= active_set.size() || active_set[expected] != i)
      {
        throw ArgumentError("quadrature rule: active set does not match weight support");
      }
      expected++;
    }
  }
  if (expected != active_set.size())
  {
    throw ArgumentError("quadrature rule: active set lists zero weights");
  }
}

}  // namespace morforge
