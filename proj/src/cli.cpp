// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "morforge/driver.hpp"
#include "morforge/persist.hpp"

namespace morforge
{

namespace
{

namespace fs = std::filesystem;

std::string Num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Short(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

std::string MuText(const ParamVec &mu)
{
  std::string s = "(";
  for (std::size_t i = 0; i < mu.size(); i++)
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", mu[i]);
    s += (i ? ", " : "") + std::string(buf);
  }
  return s + ")";
}

std::string DeltaTag(double delta)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.0e", delta);
  return buf;
}

ParamBox ConfiguredBox(const RunConfig &c, const ParamBox &fallback)
{
  return c.mu_lower.empty() ? fallback : ParamBox(c.mu_lower, c.mu_upper);
}

void EnsureDir(const std::string &dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
  {
    throw IoError(dir + ": cannot create output directory");
  }
}

std::string PathIn(const std::string &dir, const std::string &name)
{
  return (fs::path(dir) / name).string();
}

GreedyConfig SteadyGreedyConfig(const RunConfig &c, const ParamBox &box)
{
  GreedyConfig g;
  g.train = TrainGrid(box, {c.grid, GridLogSpacing(c)});
  g.tol = c.tol;
  g.n_max = c.n_max;
  g.m_factor = c.m_factor;
  g.delta = c.delta;
  g.variant = c.variant;
  g.compare_cold = c.compare_cold;
  g.timing = c.timing;
  g.threads = c.threads;
  return g;
}

// Simple comma-separated table with a header row.
struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int Column(const std::string &name) const
  {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  }
};

std::vector<std::string> SplitCsv(const std::string &line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ','))
  {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',')
  {
    out.emplace_back();
  }
  return out;
}

CsvTable ReadCsv(const std::string &path)
{
  std::stringstream ss(ReadTextFile(path));
  CsvTable t;
  std::string line;
  if (!std::getline(ss, line))
  {
    throw FormatError(path + ": empty CSV file");
  }
  t.header = SplitCsv(line);
  while (std::getline(ss, line))
  {
    if (line.empty())
    {
      continue;
    }
    auto cells = SplitCsv(line);
    if (cells.size() != t.header.size())
    {
      throw FormatError(path + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                        std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

double Cell(const CsvTable &t, std::size_t row, int col, const std::string &path)
{
  try
  {
    std::size_t used = 0;
    const double v = std::stod(t.rows[row][col], &used);
    if (used != t.rows[row][col].size())
    {
      throw std::invalid_argument("trailing");
    }
    return v;
  }
  catch (const std::exception &)
  {
    throw FormatError(path + ": column '" + t.header[col] + "' row " + std::to_string(row + 1) +
                      " is not numeric");
  }
}

std::vector<int> RequireColumns(const CsvTable &t, const std::vector<std::string> &names,
                                const std::string &path)
{
  std::vector<int> cols;
  for (const auto &n : names)
  {
    const int c = t.Column(n);
    if (c < 0)
    {
      throw FormatError(path + ": schema error, missing column '" + n + "'");
    }
    cols.push_back(c);
  }
  return cols;
}

std::vector<ParamVec> ReadParamFile(const std::string &path, std::size_t p)
{
  std::stringstream ss(ReadTextFile(path));
  std::vector<ParamVec> out;
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line))
  {
    lineno++;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
    {
      line.resize(hash);
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::stringstream ls(line);
    std::vector<double> v;
    std::string tok;
    while (ls >> tok)
    {
      try
      {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size())
        {
          throw std::invalid_argument("trailing");
        }
      }
      catch (const std::exception &)
      {
        throw ConfigError(path + ": line " + std::to_string(lineno) + " is not numeric");
      }
    }
    if (v.empty())
    {
      continue;
    }
    if (v.size() != p)
    {
      throw ConfigError(path + ": line " + std::to_string(lineno) + " needs " + std::to_string(p) +
                        " parameter values");
    }
    out.emplace_back(std::move(v));
  }
  if (out.empty())
  {
    throw ConfigError(path + ": parameter file lists no parameters");
  }
  return out;
}

struct Options
{
  std::string config_path;
  std::string variant;
  std::string output;
  std::vector<std::string> overrides;
  std::vector<double> deltas;
  int threads = 0;
  std::string bundle;
  std::string params = "random";
  std::string grid;
  int n_test = 20;
  std::uint64_t seed = 1;
  std::string trace_dir;
};

RunConfig ResolveConfig(const Options &o)
{
  RunConfig c = LoadRunConfig(o.config_path);
  for (const auto &kv : o.overrides)
  {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
    {
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    }
    SetConfigValue(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.variant.empty())
  {
    SetConfigValue(c, "variant", o.variant);
  }
  if (!o.output.empty())
  {
    c.output_dir = o.output;
  }
  if (o.threads > 0)
  {
    c.threads = o.threads;
  }
  if (!o.deltas.empty())
  {
    c.deltas = o.deltas;
  }
  ValidateRunConfig(c);
  return c;
}

int TrainSteady(const Options &o, std::ostream &out)
{
  const RunConfig c = ResolveConfig(o);
  if (c.model != "reaction_diffusion")
  {
    throw ConfigError("config key 'model': train-steady needs the reaction_diffusion model");
  }
  const auto levels = SteadyHierarchy(c);
  const auto fine = levels.back();
  GreedyConfig g = SteadyGreedyConfig(c, fine->Box());
  EnsureDir(c.output_dir);

  SteadyGreedyResult result;
  if (c.variant == GreedyVariant::kMultiFidelity)
  {
    MultiFidelityResult mf = MultiFidelityGreedy(g, levels.front(), fine);
    out << "coarse level " << levels.front()->MeshLevel() << ": n = " << mf.coarse.rom->Size()
        << ", " << mf.coarse.trace.NumHfSolves() << " HF solves, seed size "
        << mf.seed_indices.size() << "\n";
    result = std::move(mf.fine);
  }
  else
  {
    result = WeakGreedySteady(g, fine);
  }
  for (const auto &r : result.trace.records)
  {
    out << "iter " << r.iter << " mu=" << MuText(r.mu) << " n=" << r.n << " m=" << r.m
        << " indicator_max=" << Short(r.indicator_max) << " true_rel_err=" << Short(r.true_rel_err)
        << " nnls_solves=" << r.nnls_solves << " nnz=" << r.nnz_elem + r.nnz_facet << "\n";
  }

  const std::string tag = ToString(c.variant);
  const auto test = RandomParams(fine->Box(), c.n_test, c.seed, GridLogSpacing(c));
  const RomEvaluation ev = EvaluateSteadyRom(*result.rom, test, c.threads);
  int solves = 0, solves_cold = 0;
  GreedyRecord sums;
  for (const auto &r : result.trace.records)
  {
    solves += r.nnls_solves;
    solves_cold += std::max(0, r.nnls_solves_cold);
    sums.t_rob += r.t_rob;
    sums.t_es += r.t_es;
    sums.t_eqp += r.t_eqp;
    sums.t_search += r.t_search;
    sums.t_hf += r.t_hf;
  }
  std::string metrics =
    "variant,n,m,hf_solves,nnls_solves_total,nnls_solves_cold_total,nnz_elem,nnz_facet,"
    "e_max_test,e_avg_test,n_test,seed,t_rob_s,t_es_s,t_eqp_s,t_search_s,t_hf_s,overhead_s,"
    "total_s\n";
  const double total = sums.t_rob + sums.t_es + sums.t_eqp + sums.t_search + sums.t_hf +
                       result.trace.overhead_s;
  metrics += tag + "," + std::to_string(result.rom->Size()) + "," +
             std::to_string(result.rom->Test().Size()) + "," +
             std::to_string(result.trace.NumHfSolves()) + "," + std::to_string(solves) + "," +
             std::to_string(solves_cold) + "," + std::to_string(result.rom->Quad().NnzElements()) +
             "," + std::to_string(result.rom->Quad().NnzFacets()) + "," + Num(ev.e_max) + "," +
             Num(ev.e_avg) + "," + std::to_string(c.n_test) + "," + std::to_string(c.seed) + "," +
             Num(sums.t_rob) + "," + Num(sums.t_es) + "," + Num(sums.t_eqp) + "," +
             Num(sums.t_search) + "," + Num(sums.t_hf) + "," + Num(result.trace.overhead_s) + "," +
             Num(total) + "\n";

  SaveRomBundle(PathIn(c.output_dir, "rom_" + tag + ".mfb"), *result.rom, c.Hash());
  WriteTextFile(PathIn(c.output_dir, "trace_" + tag + ".csv"), SteadyTraceCsv(result.trace));
  WriteTextFile(PathIn(c.output_dir, "metrics_" + tag + ".csv"), metrics);
  for (const auto &w : result.trace.warnings)
  {
    out << "warning: " << w << "\n";
  }
  out << "done: " << result.trace.NumHfSolves() << " HF solves, n = " << result.rom->Size()
      << ", E_avg(test) = " << Short(ev.e_avg) << ", outputs in " << c.output_dir << "\n";
  return kExitOk;
}

int TrainUnsteady(const Options &o, std::ostream &out)
{
  const RunConfig c = ResolveConfig(o);
  if (c.model != "creep_bar")
  {
    throw ConfigError("config key 'model': train-unsteady needs the creep_bar model");
  }
  const auto levels = CreepHierarchy(c);
  UnsteadyConfig u;
  u.train = TrainGrid(levels.back()->Box(), {c.grid, GridLogSpacing(c)});
  u.time_grid = UniformTimeGrid(c.final_time, c.n_steps);
  u.maxit = c.maxit;
  u.tol = c.pod_tol;
  u.deltas = c.deltas;
  u.timing = c.timing;
  u.threads = c.threads;
  EnsureDir(c.output_dir);
  const UnsteadyGreedyResult r = PodGreedyUnsteady(u, levels.back(), levels.front());
  for (std::size_t it = 0; it < r.order.size() && it < r.n_after_iteration.size(); it++)
  {
    out << "iter " << it << " mu=" << MuText(u.train[r.order[it]])
        << " n=" << r.n_after_iteration[it] << " rows_added=" << r.rows_added[it];
    for (const auto &d : r.per_delta)
    {
      out << " | delta=" << DeltaTag(d.delta) << " warm=" << d.records[it].nnls_solves
          << " cold=" << d.records[it].nnls_solves_cold;
    }
    out << "\n";
  }
  for (const auto &d : r.per_delta)
  {
    const std::string tag = "unsteady_d" + DeltaTag(d.delta);
    WriteTextFile(PathIn(c.output_dir, "trace_" + tag + ".csv"), UnsteadyTraceCsv(d));
    SaveRomBundle(PathIn(c.output_dir, "rom_" + tag + ".mfb"), *d.rom, c.Hash());
  }
  out << "done: " << r.order.size() << " iterations, n = " << r.rob.Size() << ", "
      << r.per_delta.size() << " traces in " << c.output_dir << "\n";
  return kExitOk;
}

int Eval(const Options &o, std::ostream &out)
{
  const RomBundle bundle = LoadRomBundle(o.bundle);
  const ParamBox &box = bundle.steady ? bundle.steady->Model().Box() : bundle.unsteady->Model().Box();
  const bool log = !bundle.steady;
  std::vector<ParamVec> params;
  if (o.params == "random")
  {
    if (o.n_test < 1)
    {
      throw ConfigError("--n-test must be at least 1");
    }
    params = RandomParams(box, o.n_test, o.seed, std::vector<bool>(box.dim(), log));
  }
  else if (o.params == "grid")
  {
    GridSpec spec;
    std::stringstream ss(o.grid.empty() ? std::string("10,10") : o.grid);
    std::string item;
    while (std::getline(ss, item, ','))
    {
      try
      {
        spec.sizes.push_back(std::stoi(item));
      }
      catch (const std::exception &)
      {
        throw ConfigError("--grid expects comma-separated integers");
      }
      if (spec.sizes.back() < 1)
      {
        throw ConfigError("--grid sizes must be at least 1");
      }
    }
    spec.log_spacing.assign(spec.sizes.size(), log);
    params = TrainGrid(box, spec);
  }
  else
  {
    params = ReadParamFile(o.params, box.dim());
  }
  for (const auto &mu : params)
  {
    try
    {
      box.Require(mu);
    }
    catch (const ArgumentError &e)
    {
      throw ConfigError(std::string("parameter outside the model box: ") + e.what());
    }
  }

  const std::string path = o.output.empty() ? "eval.csv" : o.output;
  std::string csv;
  if (bundle.steady)
  {
    const RomEvaluation ev = EvaluateSteadyRom(*bundle.steady, params, std::max(1, o.threads));
    csv = "index,";
    for (std::size_t i = 0; i < box.dim(); i++)
    {
      csv += "mu_" + std::to_string(i + 1) + ",";
    }
    csv += "rel_err,indicator\n";
    for (std::size_t i = 0; i < params.size(); i++)
    {
      csv += std::to_string(i) + ",";
      for (double v : params[i].values())
      {
        csv += Num(v) + ",";
      }
      csv += Num(ev.errors[i]) + "," + Num(ev.indicators[i]) + "\n";
    }
    out << "E_max = " << Short(ev.e_max) << "\nE_avg = " << Short(ev.e_avg) << "\n";
  }
  else
  {
    const UnsteadyRom &rom = *bundle.unsteady;
    const CreepBarModel &model = rom.Model();
    csv = "index,time,q_hf,q_rom\n";
    double e_max = 0.0, e_avg = 0.0;
    for (std::size_t i = 0; i < params.size(); i++)
    {
      const Trajectory traj = SolveUnsteady(model, params[i], rom.TimeGrid(), rom.Settings());
      const ReducedTrajectory red = rom.March(params[i]);
      std::vector<double> q_hf;
      for (int k = 0; k <= traj.NumSteps(); k++)
      {
        q_hf.push_back(model.TipDisplacement(traj.states[k], traj.times[k]));
        csv += std::to_string(i) + "," + Num(traj.times[k]) + "," + Num(q_hf.back()) + "," +
               Num(red.qoi[k]) + "\n";
      }
      if (traj.NumSteps() >= 1)
      {
        const QoiErrors qe = QoiError(traj.times, q_hf, red.qoi);
        e_max = std::max(e_max, qe.e_max);
        e_avg += qe.e_avg / static_cast<double>(params.size());
      }
    }
    out << "QoI E_max = " << Short(e_max) << "\nQoI E_avg = " << Short(e_avg) << "\n";
  }
  WriteTextFile(path, csv);
  out << params.size() << " parameters evaluated, rows in " << path << "\n";
  return kExitOk;
}

int Report(const Options &o, std::ostream &out)
{
  if (!fs::is_directory(o.trace_dir))
  {
    throw IoError(o.trace_dir + ": not a directory");
  }
  std::vector<fs::path> files;
  for (const auto &e : fs::directory_iterator(o.trace_dir))
  {
    const std::string name = e.path().filename().string();
    if (name.rfind("trace_", 0) == 0 && e.path().extension() == ".csv")
    {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
  {
    throw IoError(o.trace_dir + ": no trace_*.csv files");
  }
  const std::vector<std::string> cost_cols{"t_rob_s", "t_es_s", "t_eqp_s", "t_search_s", "t_hf_s"};
  std::string table = "variant,rob_s,es_s,eqp_s,search_s,hf_s,overhead_s,total_s,hf_solves,"
                      "nnls_solves,final_n\n";
  std::string series = "variant,iter,n,m,nnls_solves,nnls_solves_cold,nnz,true_rel_err,"
                       "indicator_max,t_eqp_s,speedup\n";
  for (const auto &f : files)
  {
    const std::string path = f.string();
    const std::string variant = f.stem().string().substr(6);
    const CsvTable t = ReadCsv(path);
    const std::vector<int> cost = RequireColumns(t, cost_cols, path);
    const std::vector<int> base = RequireColumns(
      t, {"iter", "n", "m", "nnls_solves", "nnz_elem", "nnz_facet", "true_rel_err", "indicator_max"},
      path);
    const int cold_col = t.Column("nnls_solves_cold");
    const int speed_col = t.Column("speedup");
    double overhead = 0.0;
    const fs::path metrics = f.parent_path() / ("metrics_" + variant + ".csv");
    if (fs::exists(metrics))
    {
      const CsvTable m = ReadCsv(metrics.string());
      const int oc = RequireColumns(m, {"overhead_s"}, metrics.string())[0];
      if (!m.rows.empty())
      {
        overhead = Cell(m, 0, oc, metrics.string());
      }
    }
    std::vector<double> sums(cost.size(), 0.0);
    double nnls = 0.0, final_n = 0.0;
    for (std::size_t r = 0; r < t.rows.size(); r++)
    {
      for (std::size_t k = 0; k < cost.size(); k++)
      {
        sums[k] += Cell(t, r, cost[k], path);
      }
      nnls += Cell(t, r, base[3], path);
      final_n = Cell(t, r, base[1], path);
      series += variant + "," + t.rows[r][base[0]] + "," + t.rows[r][base[1]] + "," +
                t.rows[r][base[2]] + "," + t.rows[r][base[3]] + "," +
                (cold_col >= 0 ? t.rows[r][cold_col] : std::string("-1")) + "," +
                Num(Cell(t, r, base[4], path) + Cell(t, r, base[5], path)) + "," +
                t.rows[r][base[6]] + "," + t.rows[r][base[7]] + "," + t.rows[r][cost[2]] + "," +
                (speed_col >= 0 ? t.rows[r][speed_col] : std::string("nan")) + "\n";
    }
    double total = overhead;
    for (double s : sums)
    {
      total += s;
    }
    table += variant;
    for (double s : sums)
    {
      table += "," + Num(s);
    }
    table += "," + Num(overhead) + "," + Num(total) + "," + std::to_string(t.rows.size()) + "," +
             Num(nnls) + "," + Num(final_n) + "\n";
    out << variant << ": " << t.rows.size() << " records, total " << Short(total) << " s\n";
  }
  const std::string dir = o.output.empty() ? o.trace_dir : o.output;
  EnsureDir(dir);
  WriteTextFile(PathIn(dir, "report_costs.csv"), table);
  WriteTextFile(PathIn(dir, "report_series.csv"), series);
  out << table;
  return kExitOk;
}

}  // namespace

std::vector<bool> GridLogSpacing(const RunConfig &c)
{
  if (!c.grid_log.empty())
  {
    return c.grid_log;
  }
  return std::vector<bool>(c.grid.size(), c.model == "creep_bar");
}

std::vector<std::shared_ptr<const SteadyModel>> SteadyHierarchy(const RunConfig &c)
{
  ReactionDiffusionOptions opt;
  opt.box = ConfiguredBox(c, opt.box);
  std::vector<std::shared_ptr<const SteadyModel>> out;
  for (const Mesh &m : BuildMeshHierarchy(c.n_coarse_elements, c.mesh_levels))
  {
    out.push_back(std::make_shared<ReactionDiffusionModel>(m, opt));
  }
  return out;
}

std::vector<std::shared_ptr<const CreepBarModel>> CreepHierarchy(const RunConfig &c)
{
  CreepBarOptions opt;
  opt.box = ConfiguredBox(c, opt.box);
  std::vector<std::shared_ptr<const CreepBarModel>> out;
  for (const Mesh &m : BuildMeshHierarchy(c.n_coarse_elements, c.mesh_levels))
  {
    out.push_back(std::make_shared<CreepBarModel>(m, opt));
  }
  return out;
}

int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Reduced-order model training and evaluation", "morforge"};
  app.require_subcommand(1);
  Options o;

  auto *steady = app.add_subcommand("train-steady", "Weak-greedy LSPG ROM for the steady model");
  steady->add_option("config", o.config_path, "Run configuration (key = value)")->required();
  steady->add_option("--variant", o.variant, "vanilla | incr | incr-mf")
    ->check(CLI::IsMember({"vanilla", "incr", "incr-mf"}));
  steady->add_option("--output", o.output, "Output directory (overrides output_dir)");
  steady->add_option("--threads", o.threads, "Worker cap")->check(CLI::PositiveNumber);
  steady->add_option("--set", o.overrides, "Config override key=value (repeatable)");

  auto *unsteady =
    app.add_subcommand("train-unsteady", "POD-greedy Galerkin ROM for the creep bar");
  unsteady->add_option("config", o.config_path, "Run configuration (key = value)")->required();
  unsteady->add_option("--delta", o.deltas, "EQ tolerance sweep")->delimiter(',');
  unsteady->add_option("--output", o.output, "Output directory (overrides output_dir)");
  unsteady->add_option("--threads", o.threads, "Worker cap")->check(CLI::PositiveNumber);
  unsteady->add_option("--set", o.overrides, "Config override key=value (repeatable)");

  auto *eval = app.add_subcommand("eval", "Evaluate a ROM bundle against HF solves");
  eval->add_option("bundle", o.bundle, "ROM bundle file")->required();
  eval->add_option("--params", o.params, "random | grid | path to a parameter file");
  eval->add_option("--grid", o.grid, "Grid sizes for --params grid, e.g. 10,10");
  eval->add_option("--n-test", o.n_test, "Number of random parameters");
  eval->add_option("--seed", o.seed, "Seed of the random parameters");
  eval->add_option("--output", o.output, "Output CSV (default eval.csv)");
  eval->add_option("--threads", o.threads, "Worker cap")->check(CLI::PositiveNumber);

  auto *report = app.add_subcommand("report", "Aggregate trace CSVs into cost tables");
  report->add_option("trace_dir", o.trace_dir, "Directory with trace_*.csv")->required();
  report->add_option("--output", o.output, "Output directory (default: trace_dir)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try
  {
    app.parse(reversed);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try
  {
    if (steady->parsed())
    {
      return TrainSteady(o, out);
    }
    if (unsteady->parsed())
    {
      return TrainUnsteady(o, out);
    }
    if (eval->parsed())
    {
      return Eval(o, out);
    }
    return Report(o, out);
  }
  catch (const ConfigError &e)
  {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  catch (const ArgumentError &e)
  {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  catch (const IoError &e)
  {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  catch (const Error &e)
  {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace morforge
