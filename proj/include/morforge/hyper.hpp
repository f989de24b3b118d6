// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_HYPER_HPP
#define MORFORGE_HYPER_HPP

#include <optional>
#include <vector>

#include "morforge/fe.hpp"
#include "morforge/nnls.hpp"
#include "morforge/quad_rule.hpp"
#include "morforge/steady_model.hpp"

namespace morforge
{

// Raised when an extension is requested for a test space that does not contain the old one.
class NonNestedError : public ArgumentError
{
public:
  using ArgumentError::ArgumentError;
};

enum class RowKind
{
  kConstantElement,
  kConstantFacet,
  kAccuracy
};

struct EqRowTag
{
  RowKind kind = RowKind::kAccuracy;
  int sample = -1;
  int slab = -1;
  int mode = -1;
};

// Local residuals of one training sample, one entry per time slab (a single one when steady).
using ResidualSource = std::vector<LocalResiduals>;

//
// Empirical-quadrature constraints G rho = b with b = G * ones. Columns are the N_e element
// weights followed by the N_f facet weights.
//
struct EqSystem
{
  Matrix G;
  Vector b;
  std::vector<EqRowTag> rows;
  double delta = 1e-4;
  int num_elements = 0;
  int num_facets = 0;
  int num_samples = 0;
  // Test modes the accuracy rows were built with; extensions must keep them as leading columns.
  Matrix test_modes;

  int NumRows() const { return static_cast<int>(G.rows()); }
  int NumCols() const { return static_cast<int>(G.cols()); }
};

// Constant-function rows only.
EqSystem NewEqSystem(const FeDiscretization &model, double delta);

// One accuracy row per (sample, slab, test mode), sample-major.
EqSystem AssembleEqRows(const FeDiscretization &model, const Eigen::Ref<const Matrix> &test_modes,
                        const std::vector<ResidualSource> &samples, double delta);

// Appends the rows of the new modes for the samples already present and of every mode for the
// samples beyond system.num_samples. `samples` lists all samples, old ones first.
EqSystem ExtendEqRows(const EqSystem &system, const FeDiscretization &model,
                      const Eigen::Ref<const Matrix> &test_modes,
                      const std::vector<ResidualSource> &samples);

// Row of G for one set of local residuals tested against the field psi.
Vector EqRow(const FeDiscretization &model, const LocalResiduals &local,
             const Eigen::Ref<const Vector> &psi);

struct QuadratureResult
{
  QuadRule rule;
  NnlsResult stats;
};

QuadratureResult ComputeQuadrature(const EqSystem &system,
                                   const std::optional<QuadRule> &warm_start = std::nullopt,
                                   const NnlsSettings &settings = {});

}  // namespace morforge

#endif  // MORFORGE_HYPER_HPP
