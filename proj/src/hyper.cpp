// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/hyper.hpp"

namespace morforge
{

namespace
{

void AppendRow(EqSystem &system, const Vector &row, const EqRowTag &tag)
{
  const Eigen::Index r = system.G.rows();
  system.G.conservativeResize(r + 1, Eigen::NoChange);
  system.G.row(r) = row.transpose();
  system.b.conservativeResize(r + 1);
  system.b[r] = row.sum();
  system.rows.push_back(tag);
}

void AppendBlock(EqSystem &system, const std::vector<Vector> &rows,
                 const std::vector<EqRowTag> &tags)
{
  const Eigen::Index r0 = system.G.rows();
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  system.G.conservativeResize(r0 + nr, Eigen::NoChange);
  system.b.conservativeResize(r0 + nr);
  for (Eigen::Index i = 0; i < nr; i++)
  {
    system.G.row(r0 + i) = rows[i].transpose();
    system.b[r0 + i] = rows[i].sum();
  }
  system.rows.insert(system.rows.end(), tags.begin(), tags.end());
}

void CheckSources(const FeDiscretization &model, const std::vector<ResidualSource> &samples)
{
  for (const auto &source : samples)
  {
    for (const auto &local : source)
    {
      if (static_cast<int>(local.elem.size()) != model.NumElements() ||
          static_cast<int>(local.facet.size()) != model.NumFacets())
      {
        throw DimensionError("EQ assembly: local residuals do not match the model mesh");
      }
    }
  }
}

}  // namespace

Vector EqRow(const FeDiscretization &model, const LocalResiduals &local,
             const Eigen::Ref<const Vector> &psi)
{
  model.RequireSize(psi, "EQ test mode");
  const int ne = model.NumElements();
  Vector row = Vector::Zero(ne + model.NumFacets());
  for (int k = 0; k < ne; k++)
  {
    const auto dofs = model.ElementDofs(k);
    for (int a = 0; a < 2; a++)
    {
      if (dofs[a] >= 0)
      {
        row[k] += local.elem[k][a] * psi[dofs[a]];
      }
    }
  }
  for (int j = 0; j < model.NumFacets(); j++)
  {
    const int d = model.FacetDof(j);
    if (d >= 0)
    {
      row[ne + j] = local.facet[j] * psi[d];
    }
  }
  return row;
}

EqSystem NewEqSystem(const FeDiscretization &model, double delta)
{
  EqSystem system;
  system.delta = delta;
  system.num_elements = model.NumElements();
  system.num_facets = model.NumFacets();
  const int nc = system.num_elements + system.num_facets;
  system.G.resize(0, nc);
  system.test_modes.resize(model.NumDofs(), 0);
  Vector elem = Vector::Zero(nc), facet = Vector::Zero(nc);
  for (int k = 0; k < system.num_elements; k++)
  {
    elem[k] = model.GetMesh().ElementLength(k);
  }
  for (int j = 0; j < system.num_facets; j++)
  {
    facet[system.num_elements + j] = model.GetMesh().FacetMeasure(j);
  }
  AppendRow(system, elem, {RowKind::kConstantElement});
  AppendRow(system, facet, {RowKind::kConstantFacet});
  return system;
}

EqSystem AssembleEqRows(const FeDiscretization &model, const Eigen::Ref<const Matrix> &test_modes,
                        const std::vector<ResidualSource> &samples, double delta)
{
  EqSystem system = NewEqSystem(model, delta);
  system.test_modes.resize(model.NumDofs(), 0);
  return ExtendEqRows(system, model, test_modes, samples);
}

EqSystem ExtendEqRows(const EqSystem &system, const FeDiscretization &model,
                      const Eigen::Ref<const Matrix> &test_modes,
                      const std::vector<ResidualSource> &samples)
{
  if (system.num_elements != model.NumElements() || system.num_facets != model.NumFacets())
  {
    throw DimensionError("EQ extension: system columns do not match the model mesh");
  }
  if (test_modes.rows() != model.NumDofs())
  {
    throw DimensionError("EQ extension: test modes do not match the model");
  }
  const int old_m = static_cast<int>(system.test_modes.cols());
  if (test_modes.cols() < old_m || test_modes.leftCols(old_m) != system.test_modes)
  {
    throw NonNestedError("EQ extension: new test space does not extend the old one; rebuild");
  }
  if (static_cast<int>(samples.size()) < system.num_samples)
  {
    throw ArgumentError("EQ extension: fewer samples than already assembled");
  }
  CheckSources(model, samples);
  const int m = static_cast<int>(test_modes.cols());
  std::vector<Vector> rows;
  std::vector<EqRowTag> tags;
  for (int s = 0; s < static_cast<int>(samples.size()); s++)
  {
    const int first = s < system.num_samples ? old_m : 0;
    for (int slab = 0; slab < static_cast<int>(samples[s].size()); slab++)
    {
      for (int i = first; i < m; i++)
      {
        rows.push_back(EqRow(model, samples[s][slab], test_modes.col(i)));
        tags.push_back({RowKind::kAccuracy, s, slab, i});
      }
    }
  }
  EqSystem out = system;
  AppendBlock(out, rows, tags);
  out.test_modes = test_modes;
  out.num_samples = static_cast<int>(samples.size());
  return out;
}

QuadratureResult ComputeQuadrature(const EqSystem &system,
                                   const std::optional<QuadRule> &warm_start,
                                   const NnlsSettings &settings)
{
  NnlsProblem problem{system.G, system.b, system.delta, {}};
  if (warm_start)
  {
    if (warm_start->NumElements() != system.num_elements ||
        warm_start->NumFacets() != system.num_facets)
    {
      throw DimensionError("compute_quadrature: warm-start rule does not match the system");
    }
    problem.warm_start = warm_start->active_set;
  }
  QuadratureResult out;
  out.stats = NnlsSolve(problem, settings);
  out.rule = QuadRule::FromConcatenated(out.stats.rho, system.num_elements);
  return out;
}

}  // namespace morforge
