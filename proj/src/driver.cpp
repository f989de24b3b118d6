// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace morforge
{

std::string ToString(GreedyVariant variant)
{
  switch (variant)
  {
    case GreedyVariant::kVanilla:
      return "vanilla";
    case GreedyVariant::kIncremental:
      return "incr";
    case GreedyVariant::kMultiFidelity:
      return "incr-mf";
  }
  return "unknown";
}

GreedyVariant GreedyVariantFromString(const std::string &s)
{
  if (s == "vanilla")
  {
    return GreedyVariant::kVanilla;
  }
  if (s == "incr" || s == "incremental")
  {
    return GreedyVariant::kIncremental;
  }
  if (s == "incr-mf" || s == "mf")
  {
    return GreedyVariant::kMultiFidelity;
  }
  throw ConfigError("unknown greedy variant '" + s + "' (expected vanilla, incr or incr-mf)");
}

namespace
{

class Stopwatch
{
public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(Clock::now()) {}

  // Seconds since construction or the previous lap; 0 when timing is disabled.
  double Lap()
  {
    const auto now = Clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return enabled_ ? s : 0.0;
  }

private:
  using Clock = std::chrono::steady_clock;
  bool enabled_;
  Clock::time_point start_;
};

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double UnitDouble(std::mt19937_64 &gen)
{
  return static_cast<double>(gen() >> 11) * 0x1p-53;
}

// Uniform integer in [0, bound] by rejection sampling.
std::uint64_t UniformIndex(std::mt19937_64 &gen, std::uint64_t bound)
{
  const std::uint64_t range = bound + 1;
  if (range == 0)
  {
    return gen();
  }
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = 0;
  do
  {
    x = gen();
  } while (x >= limit);
  return x % range;
}

double TrialRelativeError(const InnerProduct &ip, const Vector &ref, const Vector &approx)
{
  const double norm = ip.Norm(ref);
  const double err = ip.Norm(ref - approx);
  return norm > 0.0 ? err / norm : err;
}

}  // namespace

std::vector<ParamVec> TrainGrid(const ParamBox &box, const GridSpec &spec)
{
  const std::size_t p = box.dim();
  if (spec.sizes.size() != p)
  {
    throw ConfigError("grid: need one size per parameter");
  }
  std::vector<std::vector<double>> axes(p);
  for (std::size_t i = 0; i < p; i++)
  {
    const int n = spec.sizes[i];
    if (n < 1)
    {
      throw ConfigError("grid: every axis needs at least one point");
    }
    const bool log = i < spec.log_spacing.size() && spec.log_spacing[i];
    if (log && !(box.lower(i) > 0.0))
    {
      throw ConfigError("grid: log spacing needs a positive lower bound");
    }
    for (int k = 0; k < n; k++)
    {
      const double s = n == 1 ? 0.5 : static_cast<double>(k) / (n - 1);
      axes[i].push_back(log ? std::exp(std::log(box.lower(i)) +
                                       s * (std::log(box.upper(i)) - std::log(box.lower(i))))
                            : box.lower(i) + s * (box.upper(i) - box.lower(i)));
    }
    axes[i].front() = n == 1 ? axes[i].front() : box.lower(i);
    axes[i].back() = n == 1 ? axes[i].back() : box.upper(i);
  }
  std::vector<ParamVec> out;
  std::vector<int> idx(p, 0);
  while (true)
  {
    std::vector<double> v(p);
    for (std::size_t i = 0; i < p; i++)
    {
      v[i] = axes[i][idx[i]];
    }
    out.emplace_back(std::move(v));
    std::size_t i = p;
    while (i > 0)
    {
      i--;
      if (++idx[i] < spec.sizes[i])
      {
        break;
      }
      idx[i] = 0;
      if (i == 0)
      {
        return out;
      }
    }
    if (p == 0)
    {
      return out;
    }
  }
}

std::vector<ParamVec> RandomParams(const ParamBox &box, int count, std::uint64_t seed,
                                   const std::vector<bool> &log_spacing)
{
  std::mt19937_64 gen(seed);
  std::vector<ParamVec> out;
  for (int c = 0; c < count; c++)
  {
    std::vector<double> v(box.dim());
    for (std::size_t i = 0; i < box.dim(); i++)
    {
      const double s = UnitDouble(gen);
      const bool log = i < log_spacing.size() && log_spacing[i] && box.lower(i) > 0.0;
      v[i] = log ? std::exp(std::log(box.lower(i)) +
                            s * (std::log(box.upper(i)) - std::log(box.lower(i))))
                 : box.lower(i) + s * (box.upper(i) - box.lower(i));
    }
    out.emplace_back(std::move(v));
  }
  return out;
}

void ParallelFor(int n, int threads, const std::function<void(int)> &body)
{
  threads = std::max(1, std::min(threads, n));
  if (threads == 1)
  {
    for (int i = 0; i < n; i++)
    {
      body(i);
    }
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex mutex;
  for (int t = 0; t < threads; t++)
  {
    pool.emplace_back(
      [&, t]()
      {
        for (int i = t; i < n; i += threads)
        {
          try
          {
            body(i);
          }
          catch (...)
          {
            std::lock_guard<std::mutex> lock(mutex);
            if (!error)
            {
              error = std::current_exception();
            }
          }
        }
      });
  }
  for (auto &th : pool)
  {
    th.join();
  }
  if (error)
  {
    std::rethrow_exception(error);
  }
}

namespace
{

struct SteadyState
{
  Rob rob;
  TestSpaceState test;
  std::vector<TrainingSnapshot> snaps;
  std::optional<QuadRule> rule;
};

// ROB / test space / quadrature update after the snapshots [first, snaps.size()) were added.
void UpdateRom(const GreedyConfig &config, const std::shared_ptr<const SteadyModel> &model,
               SteadyState &state, std::size_t first, GreedyRecord &rec,
               SteadyGreedyResult &result)
{
  const InnerProduct &trial = model->TrialInnerProduct();
  const InnerProduct &test = model->TestInnerProduct();
  const bool incremental = config.variant != GreedyVariant::kVanilla;
  Stopwatch sw(config.timing);
  double t_rob = 0.0, t_es = 0.0;
  if (state.rob.Size() == 0)
  {
    state.rob.basis.resize(model->NumDofs(), 0);
    state.rob.mesh_level = model->MeshLevel();
    state.test.modes.resize(model->NumDofs(), 0);
  }
  for (std::size_t s = first; s < state.snaps.size(); s++)
  {
    sw.Lap();
    const bool appended = AppendToRob(state.rob, state.snaps[s].u, trial);
    t_rob += sw.Lap();
    if (incremental)
    {
      Matrix fresh;
      if (appended)
      {
        const std::vector<TrainingSnapshot> prior(state.snaps.begin(), state.snaps.begin() + s);
        fresh = BuildTestSnapshots(*model, state.rob, state.snaps[s], prior);
      }
      else
      {
        fresh = JacobianTestSnapshots(*model, state.rob, state.snaps[s].u, state.snaps[s].mu);
      }
      state.test = HapodUpdate(state.test, fresh, config.m_factor * state.rob.Size(), test);
      if (config.keep_test_snapshots)
      {
        Matrix &pool = result.pooled_test_snapshots;
        if (pool.cols() == 0)
        {
          pool.resize(fresh.rows(), 0);
        }
        pool.conservativeResize(Eigen::NoChange, pool.cols() + fresh.cols());
        pool.rightCols(fresh.cols()) = fresh;
      }
      t_es += sw.Lap();
    }
  }
  if (!incremental)
  {
    sw.Lap();
    const Matrix all = BuildAllTestSnapshots(*model, state.rob, state.snaps);
    const PodBasis pod = Pod(all, PodTarget::Fixed(config.m_factor * state.rob.Size()), test);
    state.test.modes = pod.modes;
    state.test.eigenvalues = pod.eigenvalues.head(pod.Size());
    if (config.keep_test_snapshots)
    {
      result.pooled_test_snapshots = all;
    }
    t_es += sw.Lap();
  }

  sw.Lap();
  std::vector<ResidualSource> sources(state.snaps.size());
  std::vector<ParamVec> mus;
  std::vector<Vector> alphas;
  for (std::size_t s = 0; s < state.snaps.size(); s++)
  {
    const Vector alpha = ProjectCoordinates(state.rob, state.snaps[s].u, trial);
    sources[s] = {model->EvaluateLocal(state.rob.basis * alpha, state.snaps[s].mu)};
    mus.push_back(state.snaps[s].mu);
    alphas.push_back(alpha);
  }
  const EqSystem system = AssembleEqRows(*model, state.test.modes, sources, config.delta);
  const double t_assembly = sw.Lap();
  const bool use_warm = config.warm_start.value_or(incremental);
  const std::optional<QuadRule> warm = use_warm ? state.rule : std::nullopt;
  const QuadratureResult quad = ComputeQuadrature(system, warm);
  const double t_nnls = sw.Lap();
  const double bnorm = system.b.norm();
  rec.eq_residual = bnorm > 0.0 ? quad.stats.residual_norm / bnorm : 0.0;
  if (config.compare_cold)
  {
    if (warm)
    {
      sw.Lap();
      const QuadratureResult cold = ComputeQuadrature(system, std::nullopt);
      rec.t_eqp_cold = t_assembly + sw.Lap();
      rec.nnls_solves_cold = cold.stats.ls_solve_count;
      rec.nnz_cold = static_cast<int>(cold.stats.active_set.size());
      rec.eq_residual_cold = bnorm > 0.0 ? cold.stats.residual_norm / bnorm : 0.0;
    }
    else
    {
      rec.t_eqp_cold = t_assembly + t_nnls;
      rec.nnls_solves_cold = quad.stats.ls_solve_count;
      rec.nnz_cold = static_cast<int>(quad.stats.active_set.size());
      rec.eq_residual_cold = rec.eq_residual;
    }
  }
  state.rule = quad.rule;

  auto rom = std::make_shared<SteadyRom>(model, state.rob, state.test, quad.rule,
                                         config.gauss_newton);
  rom->SetTrainingData(std::move(mus), std::move(alphas));
  result.rom = rom;
  result.systems.push_back(system);
  result.rules.push_back(quad.rule);

  rec.n = state.rob.Size();
  rec.m = state.test.Size();
  rec.nnls_solves = quad.stats.ls_solve_count;
  rec.nnz_elem = quad.rule.NnzElements();
  rec.nnz_facet = quad.rule.NnzFacets();
  rec.t_rob += t_rob;
  rec.t_es += t_es;
  rec.t_eqp += t_assembly + t_nnls;
}

Vector ClosestInit(const std::vector<TrainingSnapshot> &snaps, const ParamBox &box,
                   const ParamVec &mu, int n)
{
  if (snaps.empty())
  {
    return Vector::Zero(n);
  }
  std::size_t best = 0;
  double dbest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < snaps.size(); i++)
  {
    const double d = box.ScaledDistance(mu, snaps[i].mu);
    if (d < dbest)
    {
      dbest = d;
      best = i;
    }
  }
  return snaps[best].u;
}

}  // namespace

SteadyGreedyResult WeakGreedySteady(const GreedyConfig &config,
                                    std::shared_ptr<const SteadyModel> model)
{
  if (!(config.tol > 0.0))
  {
    throw ConfigError("greedy: tol must be positive");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0))
  {
    throw ConfigError("greedy: delta must lie in (0, 1)");
  }
  if (config.train.empty())
  {
    throw ConfigError("greedy: empty training set");
  }
  if (config.m_factor < 1 || config.n_max < 1)
  {
    throw ConfigError("greedy: m_factor and n_max must be at least 1");
  }
  SteadyGreedyResult result;
  SteadyState state;
  const InnerProduct &trial = model->TrialInnerProduct();
  std::vector<ParamVec> initial =
    config.initial.empty() ? model->Box().CornersAndCenter() : config.initial;
  if (static_cast<int>(initial.size()) > config.n_max)
  {
    initial.resize(config.n_max);
  }

  auto hf_solve = [&](const ParamVec &mu, GreedyRecord &rec)
  {
    Stopwatch sw(config.timing);
    const Vector init = config.hf_init ? config.hf_init(mu)
                                       : ClosestInit(state.snaps, model->Box(), mu,
                                                     model->NumDofs());
    const SteadySolve sol = SolveSteady(*model, mu, &init, config.newton);
    rec.hf_newton_iterations = sol.iterations;
    rec.t_hf = sw.Lap();
    return sol.u.values;
  };

  for (const auto &mu : initial)
  {
    GreedyRecord rec;
    rec.iter = static_cast<int>(result.trace.records.size());
    rec.mu = mu;
    Vector u = hf_solve(mu, rec);
    state.snaps.push_back({mu, std::move(u)});
    result.trace.records.push_back(rec);
  }
  UpdateRom(config, model, state, 0, result.trace.records.back(), result);

  const int ntrain = static_cast<int>(config.train.size());
  for (int iteration = 0; config.max_iterations < 0 || iteration < config.max_iterations;
       iteration++)
  {
    if (result.trace.NumHfSolves() >= config.n_max)
    {
      break;
    }
    Stopwatch sw(config.timing);
    std::vector<double> indicator(ntrain, -1.0);
    std::vector<Vector> alpha(ntrain);
    std::vector<std::string> failures(ntrain);
    std::vector<bool> sampled(ntrain, false);
    for (int i = 0; i < ntrain; i++)
    {
      for (const auto &s : state.snaps)
      {
        if (s.mu == config.train[i])
        {
          sampled[i] = true;
        }
      }
    }
    const SteadyRom &rom = *result.rom;
    ParallelFor(ntrain, config.threads,
                [&](int i)
                {
                  if (sampled[i])
                  {
                    return;
                  }
                  try
                  {
                    alpha[i] = rom.Solve(config.train[i]).alpha;
                    indicator[i] =
                      ErrorIndicator(*model, rom.Reconstruct(alpha[i]), config.train[i]);
                  }
                  catch (const SolverError &e)
                  {
                    failures[i] = e.what();
                  }
                });
    for (int i = 0; i < ntrain; i++)
    {
      if (!failures[i].empty())
      {
        result.trace.warnings.push_back("sweep: parameter " + std::to_string(i) +
                                        " excluded: " + failures[i]);
      }
    }
    int best = -1;
    for (int i = 0; i < ntrain; i++)
    {
      if (indicator[i] >= 0.0 && (best < 0 || indicator[i] > indicator[best]))
      {
        best = i;
      }
    }
    if (best < 0)
    {
      result.trace.warnings.push_back("sweep: no admissible parameter left");
      break;
    }
    GreedyRecord rec;
    rec.iter = static_cast<int>(result.trace.records.size());
    rec.mu = config.train[best];
    rec.indicator_max = indicator[best];
    rec.t_search = sw.Lap();
    Vector u = hf_solve(rec.mu, rec);
    rec.true_rel_err = TrialRelativeError(trial, u, rom.Reconstruct(alpha[best]));
    state.snaps.push_back({rec.mu, std::move(u)});
    result.trace.records.push_back(rec);
    UpdateRom(config, model, state, state.snaps.size() - 1, result.trace.records.back(), result);
    if (rec.true_rel_err < config.tol)
    {
      break;
    }
  }
  result.snapshots = std::move(state.snaps);
  return result;
}

MultiFidelityResult MultiFidelityGreedy(const GreedyConfig &config,
                                        std::shared_ptr<const SteadyModel> coarse_model,
                                        std::shared_ptr<const SteadyModel> fine_model,
                                        std::optional<GreedyConfig> coarse_config, int n_seed)
{
  MultiFidelityResult out;
  Stopwatch sw(config.timing);
  GreedyConfig cc = coarse_config ? *coarse_config : config;
  cc.variant = GreedyVariant::kIncremental;
  cc.hf_init = nullptr;
  cc.initial.clear();
  cc.train = config.train;
  out.coarse = WeakGreedySteady(cc, coarse_model);
  const SteadyRom &coarse_rom = *out.coarse.rom;
  const int ntrain = static_cast<int>(config.train.size());
  out.coarse_coordinates.resize(coarse_rom.Size(), ntrain);
  ParallelFor(ntrain, config.threads,
              [&](int i)
              {
                try
                {
                  out.coarse_coordinates.col(i) = coarse_rom.Solve(config.train[i]).alpha;
                }
                catch (const SolverError &)
                {
                  out.coarse_coordinates.col(i) = coarse_rom.DefaultInit(config.train[i]);
                }
              });
  const InnerProduct euclid = InnerProduct::Euclidean(coarse_rom.Size());
  const StrongGreedyResult sg =
    StrongGreedy(out.coarse_coordinates, n_seed, n_seed < 0 ? config.tol : -1.0, euclid);
  out.seed_indices = sg.indices;
  const double overhead = sw.Lap();

  GreedyConfig fc = config;
  fc.variant = GreedyVariant::kMultiFidelity;
  fc.initial.clear();
  for (int i : out.seed_indices)
  {
    fc.initial.push_back(config.train[i]);
  }
  const Matrix coords = out.coarse_coordinates;
  const std::vector<ParamVec> train = config.train;
  const std::shared_ptr<const SteadyRom> rom = out.coarse.rom;
  fc.hf_init = [coarse_model, fine_model, coords, train, rom](const ParamVec &mu)
  {
    Vector alpha;
    for (std::size_t i = 0; i < train.size(); i++)
    {
      if (train[i] == mu)
      {
        alpha = coords.col(i);
        break;
      }
    }
    if (alpha.size() == 0)
    {
      alpha = rom->Solve(mu).alpha;
    }
    const HfField coarse{rom->Reconstruct(alpha), coarse_model->MeshLevel()};
    return Prolongate(coarse, *coarse_model, *fine_model).values;
  };
  out.fine = WeakGreedySteady(fc, fine_model);
  out.fine.trace.overhead_s = overhead;
  return out;
}

RomEvaluation EvaluateSteadyRom(const SteadyRom &rom, const std::vector<ParamVec> &params,
                                int threads)
{
  if (params.empty())
  {
    throw ArgumentError("evaluation: empty parameter set");
  }
  const SteadyModel &model = rom.Model();
  RomEvaluation out;
  out.errors.resize(params.size());
  out.indicators.resize(params.size());
  ParallelFor(static_cast<int>(params.size()), threads,
              [&](int i)
              {
                const Vector u = SolveSteady(model, params[i]).u.values;
                const Vector ur = rom.Reconstruct(rom.Solve(params[i]).alpha);
                out.errors[i] = TrialRelativeError(model.TrialInnerProduct(), u, ur);
                out.indicators[i] = ErrorIndicator(model, ur, params[i]);
              });
  out.e_max = *std::max_element(out.errors.begin(), out.errors.end());
  out.e_avg = std::accumulate(out.errors.begin(), out.errors.end(), 0.0) / out.errors.size();
  return out;
}

namespace
{

Matrix StateMatrix(const Trajectory &traj)
{
  Matrix s(traj.states.front().size(), traj.NumSteps());
  for (int k = 1; k <= traj.NumSteps(); k++)
  {
    s.col(k - 1) = traj.states[k];
  }
  return s;
}

std::vector<double> StepSizes(const std::vector<double> &times)
{
  std::vector<double> dt;
  for (std::size_t k = 1; k < times.size(); k++)
  {
    dt.push_back(times[k] - times[k - 1]);
  }
  return dt;
}

}  // namespace

UnsteadyGreedyResult PodGreedyUnsteady(const UnsteadyConfig &config,
                                       std::shared_ptr<const CreepBarModel> model,
                                       std::shared_ptr<const CreepBarModel> selection_model)
{
  if (config.train.empty())
  {
    throw ConfigError("unsteady greedy: empty training set");
  }
  if (config.maxit < 1 || !(config.tol > 0.0))
  {
    throw ConfigError("unsteady greedy: maxit >= 1 and tol > 0 required");
  }
  for (double d : config.deltas)
  {
    if (!(d > 0.0 && d < 1.0))
    {
      throw ConfigError("unsteady greedy: every delta must lie in (0, 1)");
    }
  }
  UnsteadyGreedyResult out;
  const std::vector<double> dt = StepSizes(config.time_grid);
  Stopwatch sw(config.timing);
  if (config.order.empty())
  {
    const auto &sel = selection_model ? *selection_model : *model;
    std::vector<Matrix> trajs(config.train.size());
    ParallelFor(static_cast<int>(config.train.size()), config.threads,
                [&](int i) {
                  trajs[i] =
                    StateMatrix(SolveUnsteady(sel, config.train[i], config.time_grid, config.newton));
                });
    out.order = PodStrongGreedy(trajs, dt, config.maxit, config.tol, sel.TrialInnerProduct(),
                                sel.MeshLevel())
                  .indices;
  }
  else
  {
    out.order = config.order;
    if (static_cast<int>(out.order.size()) > config.maxit)
    {
      out.order.resize(config.maxit);
    }
  }
  out.selection_s = sw.Lap();

  const InnerProduct &trial = model->TrialInnerProduct();
  out.rob.basis.resize(model->NumDofs(), 0);
  out.rob.mesh_level = model->MeshLevel();
  out.per_delta.resize(config.deltas.size());
  std::vector<std::optional<QuadRule>> prev(config.deltas.size());
  std::vector<ResidualSource> samples;
  EqSystem system;
  const int ncols = model->NumElements() + model->NumFacets();

  for (std::size_t it = 0; it < out.order.size(); it++)
  {
    const ParamVec mu = config.train[out.order[it]];
    sw.Lap();
    const Trajectory traj = SolveUnsteady(*model, mu, config.time_grid, config.newton);
    const double t_hf = sw.Lap();
    const double proj_err = TrajectoryProjectionError(out.rob, traj, trial);
    sw.Lap();
    NestedSpaceUpdate(out.rob, StateMatrix(traj), dt, config.tol, trial);
    const double t_rob = sw.Lap();
    out.n_after_iteration.push_back(out.rob.Size());

    ResidualSource source;
    for (int k = 1; k <= traj.NumSteps(); k++)
    {
      source.push_back(model->EvaluateLocal(traj.states[k], traj.gamma[k - 1], traj.times[k],
                                            traj.Dt(k), mu));
    }
    samples.push_back(std::move(source));
    const int rows_before = it == 0 ? 0 : system.NumRows();
    system = it == 0 ? AssembleEqRows(*model, out.rob.basis, samples, config.deltas.front())
                     : ExtendEqRows(system, *model, out.rob.basis, samples);
    const double t_assembly = sw.Lap();
    out.rows_added.push_back(system.NumRows() - rows_before);

    for (std::size_t d = 0; d < config.deltas.size(); d++)
    {
      system.delta = config.deltas[d];
      auto &trace = out.per_delta[d];
      trace.delta = config.deltas[d];
      sw.Lap();
      const QuadratureResult warm = ComputeQuadrature(system, prev[d]);
      const double t_warm = sw.Lap();
      const QuadratureResult cold = ComputeQuadrature(system, std::nullopt);
      const double t_cold = sw.Lap();
      prev[d] = warm.rule;
      const double bnorm = system.b.norm();

      GreedyRecord rec;
      rec.iter = static_cast<int>(it);
      rec.mu = mu;
      rec.true_rel_err = proj_err;
      rec.n = out.rob.Size();
      rec.m = out.rob.Size();
      rec.nnls_solves = warm.stats.ls_solve_count;
      rec.nnls_solves_cold = cold.stats.ls_solve_count;
      rec.nnz_elem = warm.rule.NnzElements();
      rec.nnz_facet = warm.rule.NnzFacets();
      rec.nnz_cold = static_cast<int>(cold.stats.active_set.size());
      rec.t_rob = t_rob;
      rec.t_eqp = t_assembly + t_warm;
      rec.t_eqp_cold = t_assembly + t_cold;
      rec.t_search = it == 0 ? out.selection_s : 0.0;
      rec.t_hf = t_hf;
      rec.eq_residual = warm.stats.residual_norm / bnorm;
      rec.eq_residual_cold = cold.stats.residual_norm / bnorm;
      trace.records.push_back(rec);
      trace.pct_weights.push_back(100.0 * warm.stats.active_set.size() / ncols);
      trace.pct_weights_cold.push_back(100.0 * cold.stats.active_set.size() / ncols);
      trace.speedup.push_back(static_cast<double>(cold.stats.ls_solve_count) /
                              std::max(1, warm.stats.ls_solve_count));
    }
  }
  for (std::size_t d = 0; d < config.deltas.size(); d++)
  {
    out.per_delta[d].rom = std::make_shared<UnsteadyRom>(model, out.rob, *prev[d],
                                                         config.time_grid, config.newton);
  }
  return out;
}

double GridError(const HfField &coarse, const SteadyModel &coarse_model, const HfField &fine,
                 const SteadyModel &fine_model)
{
  const HfField p = Prolongate(coarse, coarse_model, fine_model);
  return TrialRelativeError(fine_model.TrialInnerProduct(), fine.values, p.values);
}

std::vector<double> SamplingProjectionErrors(const Eigen::Ref<const Matrix> &snapshots,
                                             const std::vector<int> &selection,
                                             const InnerProduct &ip, int n_max)
{
  if (snapshots.cols() == 0)
  {
    throw ArgumentError("sampling projection error: empty snapshot set");
  }
  const int selected = static_cast<int>(selection.size());
  const int count = n_max < 0 ? selected : n_max;
  Rob rob;
  rob.basis.resize(snapshots.rows(), 0);
  std::vector<double> out;
  double last = 1.0;
  for (int n = 0; n < count; n++)
  {
    if (n < selected)
    {
      AppendToRob(rob, snapshots.col(selection[n]), ip);
      last = RelativeProjectionErrors(snapshots, rob.basis, ip).maxCoeff();
    }
    out.push_back(last);
  }
  return out;
}

std::vector<int> RandomSequence(int n_items, int length, std::uint64_t seed)
{
  std::mt19937_64 gen(seed);
  std::vector<int> perm(n_items);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n_items - 1; i > 0; i--)
  {
    std::swap(perm[i], perm[UniformIndex(gen, static_cast<std::uint64_t>(i))]);
  }
  perm.resize(std::min(length, n_items));
  return perm;
}

double TrajectoryProjectionError(const Rob &rob, const Trajectory &traj, const InnerProduct &ip)
{
  return std::sqrt(TimeWeightedProjectionError(rob, StateMatrix(traj), StepSizes(traj.times), ip));
}

QoiErrors QoiError(const std::vector<double> &times, const std::vector<double> &q_ref,
                   const std::vector<double> &q)
{
  if (q_ref.size() != times.size() || q.size() != times.size() || times.size() < 2)
  {
    throw ArgumentError("QoI error: histories must match the time grid");
  }
  double max_diff = 0.0, max_ref = 0.0, num = 0.0, den = 0.0;
  for (std::size_t k = 1; k < times.size(); k++)
  {
    const double dt = times[k] - times[k - 1];
    const double diff = std::abs(q_ref[k] - q[k]);
    max_diff = std::max(max_diff, diff);
    max_ref = std::max(max_ref, std::abs(q_ref[k]));
    num += dt * diff;
    den += dt * std::abs(q_ref[k]);
  }
  QoiErrors out;
  out.e_max = max_ref > 0.0 ? max_diff / max_ref : max_diff;
  out.e_avg = den > 0.0 ? num / den : num;
  return out;
}

double SpearmanCorrelation(const std::vector<double> &x, const std::vector<double> &y)
{
  if (x.size() != y.size() || x.size() < 2)
  {
    throw ArgumentError("spearman: need two equally long series of length >= 2");
  }
  auto ranks = [](const std::vector<double> &v)
  {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();)
    {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
      {
        j++;
      }
      for (std::size_t k = i; k <= j; k++)
      {
        r[idx[k]] = 0.5 * (i + j) + 1.0;
      }
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); i++)
  {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
}

}  // namespace morforge
