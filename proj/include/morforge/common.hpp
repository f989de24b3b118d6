// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_COMMON_HPP
#define MORFORGE_COMMON_HPP

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace morforge
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Error hierarchy. Each category maps onto one CLI exit code (see tools/).
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error
{
public:
  using Error::Error;
};

class DimensionError : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  using Error::Error;
};

// Nonlinear or iterative solver failure; keeps the last iterate for diagnostics.
class SolverError : public Error
{
public:
  SolverError(const std::string &what, Vector last_iterate, double residual_norm,
              int step_index = -1)
    : Error(what), last_iterate_(std::move(last_iterate)), residual_norm_(residual_norm),
      step_index_(step_index)
  {
  }

  const Vector &LastIterate() const { return last_iterate_; }
  double ResidualNorm() const { return residual_norm_; }
  // Time step at which an unsteady solve failed, -1 for steady solves.
  int StepIndex() const { return step_index_; }

private:
  Vector last_iterate_;
  double residual_norm_;
  int step_index_;
};

// Parameter vector mu in R^p.
class ParamVec
{
public:
  ParamVec() = default;
  ParamVec(std::initializer_list<double> values) : values_(values) {}
  explicit ParamVec(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double &operator[](std::size_t i) { return values_[i]; }
  const std::vector<double> &values() const { return values_; }

  bool operator==(const ParamVec &other) const = default;

private:
  std::vector<double> values_;
};

// Compact parameter box P = prod_i [lower_i, upper_i].
class ParamBox
{
public:
  ParamBox() = default;
  ParamBox(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const { return lower_.size(); }
  double lower(std::size_t i) const { return lower_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }

  bool Contains(const ParamVec &mu, double slack = 1e-12) const;
  // Throws ArgumentError naming the offending component.
  void Require(const ParamVec &mu) const;

  // Distance in the unit-scaled box, used for nearest-parameter lookups.
  double ScaledDistance(const ParamVec &a, const ParamVec &b) const;

  std::vector<ParamVec> CornersAndCenter() const;

private:
  std::vector<double> lower_, upper_;
};

// High-fidelity coefficient vector (free degrees of freedom) tagged with its mesh level.
struct HfField
{
  Vector values;
  int mesh_level = 0;
};

}  // namespace morforge

#endif  // MORFORGE_COMMON_HPP
