// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/common.hpp"

#include <cmath>
#include <sstream>

namespace morforge
{

ParamBox::ParamBox(std::vector<double> lower, std::vector<double> upper)
  : lower_(std::move(lower)), upper_(std::move(upper))
{
  if (lower_.size() != upper_.size() || lower_.empty())
  {
    throw ArgumentError("parameter box: lower and upper bounds must be non-empty and of equal size");
  }
  for (std::size_t i = 0; i < lower_.size(); i++)
  {
    if (!(lower_[i] <= upper_[i]))
    {
      throw ArgumentError("parameter box: lower bound exceeds upper bound in component " +
                          std::to_string(i + 1));
    }
  }
}

bool ParamBox::Contains(const ParamVec &mu, double slack) const
{
  if (mu.size() != dim())
  {
    return false;
  }
  for (std::size_t i = 0; i < dim(); i++)
  {
    const double tol = slack * std::max(1.0, std::abs(upper_[i] - lower_[i]));
    if (mu[i] < lower_[i] - tol || mu[i] > upper_[i] + tol)
    {
      return false;
    }
  }
  return true;
}

void ParamBox::Require(const ParamVec &mu) const
{
  if (mu.size() != dim())
  {
    throw ArgumentError("parameter has " + std::to_string(mu.size()) + " components, expected " +
                        std::to_string(dim()));
  }
  if (!Contains(mu))
  {
    std::ostringstream msg;
    msg << "parameter (";
    for (std::size_t i = 0; i < mu.size(); i++)
    {
      msg << (i ? ", " : "") << mu[i];
    }
    msg << ") lies outside the parameter box";
    throw ArgumentError(msg.str());
  }
}

double ParamBox::ScaledDistance(const ParamVec &a, const ParamVec &b) const
{
  double d2 = 0.0;
  for (std::size_t i = 0; i < dim(); i++)
  {
    const double width = upper_[i] - lower_[i];
    const double d = width > 0.0 ? (a[i] - b[i]) / width : 0.0;
    d2 += d * d;
  }
  return std::sqrt(d2);
}

std::vector<ParamVec> ParamBox::CornersAndCenter() const
{
  std::vector<ParamVec> out;
  const std::size_t p = dim();
  for (std::size_t mask = 0; mask < (std::size_t(1) << p); mask++)
  {
    std::vector<double> v(p);
    for (std::size_t i = 0; i < p; i++)
    {
      v[i] = (mask >> i) & 1 ? upper_[i] : lower_[i];
    }
    out.emplace_back(std::move(v));
  }
  std::vector<double> c(p);
  for (std::size_t i = 0; i < p; i++)
  {
    c[i] = 0.5 * (lower_[i] + upper_[i]);
  }
  out.emplace_back(std::move(c));
  return out;
}

}  // namespace morforge
