// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_DRIVER_HPP
#define MORFORGE_DRIVER_HPP

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "morforge/compress.hpp"
#include "morforge/creep_model.hpp"
#include "morforge/hyper.hpp"
#include "morforge/rom.hpp"
#include "morforge/steady_model.hpp"

namespace morforge
{

enum class GreedyVariant
{
  kVanilla,
  kIncremental,
  kMultiFidelity
};

std::string ToString(GreedyVariant variant);
GreedyVariant GreedyVariantFromString(const std::string &s);

// Tensor grid over the box; log spacing per axis requires a positive lower bound.
struct GridSpec
{
  std::vector<int> sizes;
  std::vector<bool> log_spacing;
};

std::vector<ParamVec> TrainGrid(const ParamBox &box, const GridSpec &spec);
// Uniform (or log-uniform per axis) random parameters from a seeded generator.
std::vector<ParamVec> RandomParams(const ParamBox &box, int count, std::uint64_t seed,
                                   const std::vector<bool> &log_spacing = {});

void ParallelFor(int n, int threads, const std::function<void(int)> &body);

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct GreedyRecord
{
  int iter = 0;
  ParamVec mu;
  double indicator_max = kNaN;
  double true_rel_err = kNaN;
  int n = 0;
  int m = 0;
  int nnls_solves = 0;
  int nnls_solves_cold = -1;
  int nnz_elem = 0;
  int nnz_facet = 0;
  double t_rob = 0.0;
  double t_es = 0.0;
  double t_eqp = 0.0;
  double t_search = 0.0;
  double t_hf = 0.0;
  double t_eqp_cold = 0.0;
  int hf_newton_iterations = 0;
  // Relative EQ constraint residual ||G rho - b|| / ||b|| of the rule built on this row.
  double eq_residual = kNaN;
  double eq_residual_cold = kNaN;
  int nnz_cold = -1;
};

struct GreedyTrace
{
  std::vector<GreedyRecord> records;
  double overhead_s = 0.0;
  std::vector<std::string> warnings;

  int NumHfSolves() const { return static_cast<int>(records.size()); }
};

struct GreedyConfig
{
  std::vector<ParamVec> train;
  double tol = 1e-3;
  int n_max = 30;
  int m_factor = 2;
  double delta = 1e-4;
  GreedyVariant variant = GreedyVariant::kIncremental;
  // NNLS warm start; unset means on for the incremental variants.
  std::optional<bool> warm_start;
  // Also run the cold NNLS on every update for warm/cold comparisons.
  bool compare_cold = false;
  // Keep every test snapshot produced (pooled set for HAPOD checks).
  bool keep_test_snapshots = false;
  bool timing = true;
  int threads = 1;
  NewtonSettings newton;
  GaussNewtonSettings gauss_newton;
  // Initial sample; empty means box corners and center.
  std::vector<ParamVec> initial;
  // HF initial guess; empty means the closest previously solved parameter.
  std::function<Vector(const ParamVec &)> hf_init;
  // Maximum number of greedy iterations after the initial sample (<0: unbounded).
  int max_iterations = -1;
};

struct SteadyGreedyResult
{
  std::shared_ptr<SteadyRom> rom;
  GreedyTrace trace;
  std::vector<TrainingSnapshot> snapshots;
  Matrix pooled_test_snapshots;
  // Rules, stats and test spaces of every update (indexed by update).
  std::vector<EqSystem> systems;
  std::vector<QuadRule> rules;
};

SteadyGreedyResult WeakGreedySteady(const GreedyConfig &config,
                                    std::shared_ptr<const SteadyModel> model);

struct MultiFidelityResult
{
  SteadyGreedyResult coarse;
  SteadyGreedyResult fine;
  std::vector<int> seed_indices;
  // Coarse-ROM coordinates over the training grid (columns).
  Matrix coarse_coordinates;
};

// Coarse greedy with `coarse_config` (variant forced to incremental), strong greedy on its
// coordinates, then the fine greedy seeded with the result and coarse-ROM HF initialization.
MultiFidelityResult MultiFidelityGreedy(const GreedyConfig &config,
                                        std::shared_ptr<const SteadyModel> coarse_model,
                                        std::shared_ptr<const SteadyModel> fine_model,
                                        std::optional<GreedyConfig> coarse_config = std::nullopt,
                                        int n_seed = -1);

// Relative L2 (trial) errors of the ROM over a parameter list; HF solutions are computed.
struct RomEvaluation
{
  std::vector<double> errors;
  std::vector<double> indicators;
  double e_max = 0.0;
  double e_avg = 0.0;
};

RomEvaluation EvaluateSteadyRom(const SteadyRom &rom, const std::vector<ParamVec> &params,
                                int threads = 1);

struct UnsteadyConfig
{
  std::vector<ParamVec> train;
  std::vector<double> time_grid;
  int maxit = 15;
  double tol = 1e-5;
  std::vector<double> deltas{1e-2, 1e-4, 1e-6};
  bool timing = true;
  int threads = 1;
  NewtonSettings newton;
  // Selection order; empty means POD-strong-greedy on `selection_model` trajectories.
  std::vector<int> order;
};

struct UnsteadyDeltaTrace
{
  double delta = 0.0;
  std::vector<GreedyRecord> records;
  std::vector<double> pct_weights, pct_weights_cold, speedup;
  std::shared_ptr<UnsteadyRom> rom;
};

struct UnsteadyGreedyResult
{
  std::vector<UnsteadyDeltaTrace> per_delta;
  std::vector<int> order;
  Rob rob;
  double selection_s = 0.0;
  std::vector<int> n_after_iteration;
  std::vector<int> rows_added;
};

UnsteadyGreedyResult PodGreedyUnsteady(const UnsteadyConfig &config,
                                       std::shared_ptr<const CreepBarModel> model,
                                       std::shared_ptr<const CreepBarModel> selection_model);

// Metric families.
double GridError(const HfField &coarse, const SteadyModel &coarse_model, const HfField &fine,
                 const SteadyModel &fine_model);

// E_n^proj for n = 1..n_max (default selection.size()): max over columns of the relative
// projection error onto the span of the first n selected columns. Past the end of the
// selection the span stops growing.
std::vector<double> SamplingProjectionErrors(const Eigen::Ref<const Matrix> &snapshots,
                                             const std::vector<int> &selection,
                                             const InnerProduct &ip, int n_max = -1);

// Random selection sequences (portable Fisher-Yates on mt19937_64), one per seed.
std::vector<int> RandomSequence(int n_items, int length, std::uint64_t seed);

// Relative time-weighted projection error sqrt(sum dt ||u - Pi u||^2 / sum dt ||u||^2).
double TrajectoryProjectionError(const Rob &rob, const Trajectory &traj, const InnerProduct &ip);

struct QoiErrors
{
  double e_max = 0.0;
  double e_avg = 0.0;
};

// Max-norm and time-weighted average relative errors of a scalar output history (k >= 1).
QoiErrors QoiError(const std::vector<double> &times, const std::vector<double> &q_ref,
                   const std::vector<double> &q);

double SpearmanCorrelation(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace morforge

#endif  // MORFORGE_DRIVER_HPP
