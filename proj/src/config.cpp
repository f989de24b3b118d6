// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "morforge/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "morforge/persist.hpp"

namespace morforge
{

namespace
{

std::string Trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
  {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string &s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    out.push_back(Trim(item));
  }
  return out;
}

double ParseDouble(const std::string &key, const std::string &v)
{
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x))
  {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
  }
  return x;
}

long long ParseInt(const std::string &key, const std::string &v)
{
  long long x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size())
  {
    throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
  }
  return x;
}

int ParseSmallInt(const std::string &key, const std::string &v)
{
  const long long x = ParseInt(key, v);
  if (x < -1000000000LL || x > 1000000000LL)
  {
    throw ConfigError("config key '" + key + "': value out of range");
  }
  return static_cast<int>(x);
}

bool ParseBool(const std::string &key, const std::string &v)
{
  if (v == "on" || v == "true" || v == "1" || v == "yes")
  {
    return true;
  }
  if (v == "off" || v == "false" || v == "0" || v == "no")
  {
    return false;
  }
  throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean (on/off)");
}

std::vector<double> ParseDoubles(const std::string &key, const std::string &v)
{
  std::vector<double> out;
  for (const auto &item : SplitList(v))
  {
    out.push_back(ParseDouble(key, item));
  }
  return out;
}

std::string Join(const std::vector<double> &v)
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); i++)
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    s += (i ? "," : "") + std::string(buf);
  }
  return s;
}

void Require(bool ok, const std::string &key, const std::string &what)
{
  if (!ok)
  {
    throw ConfigError("config key '" + key + "': " + what);
  }
}

}  // namespace

void SetConfigValue(RunConfig &c, const std::string &key, const std::string &raw)
{
  const std::string v = Trim(raw);
  if (key == "model")
  {
    Require(v == "reaction_diffusion" || v == "creep_bar", key,
            "unknown model '" + v + "' (reaction_diffusion or creep_bar)");
    c.model = v;
  }
  else if (key == "n_coarse_elements")
  {
    c.n_coarse_elements = ParseSmallInt(key, v);
  }
  else if (key == "mesh_levels")
  {
    c.mesh_levels = ParseSmallInt(key, v);
  }
  else if (key == "mu_lower")
  {
    c.mu_lower = ParseDoubles(key, v);
  }
  else if (key == "mu_upper")
  {
    c.mu_upper = ParseDoubles(key, v);
  }
  else if (key == "grid")
  {
    c.grid.clear();
    for (const auto &item : SplitList(v))
    {
      c.grid.push_back(ParseSmallInt(key, item));
    }
  }
  else if (key == "grid_log")
  {
    c.grid_log.clear();
    for (const auto &item : SplitList(v))
    {
      c.grid_log.push_back(ParseBool(key, item));
    }
  }
  else if (key == "tol")
  {
    c.tol = ParseDouble(key, v);
  }
  else if (key == "delta")
  {
    c.delta = ParseDouble(key, v);
  }
  else if (key == "deltas")
  {
    c.deltas = ParseDoubles(key, v);
  }
  else if (key == "n_max")
  {
    c.n_max = ParseSmallInt(key, v);
  }
  else if (key == "m_factor")
  {
    c.m_factor = ParseSmallInt(key, v);
  }
  else if (key == "variant")
  {
    try
    {
      c.variant = GreedyVariantFromString(v);
    }
    catch (const ConfigError &)
    {
      throw ConfigError("config key 'variant': unknown variant '" + v +
                        "' (vanilla, incr or incr-mf)");
    }
  }
  else if (key == "seed")
  {
    const long long s = ParseInt(key, v);
    Require(s >= 0, key, "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  else if (key == "n_test")
  {
    c.n_test = ParseSmallInt(key, v);
  }
  else if (key == "output_dir")
  {
    Require(!v.empty(), key, "must not be empty");
    c.output_dir = v;
  }
  else if (key == "final_time")
  {
    c.final_time = ParseDouble(key, v);
  }
  else if (key == "n_steps")
  {
    c.n_steps = ParseSmallInt(key, v);
  }
  else if (key == "maxit")
  {
    c.maxit = ParseSmallInt(key, v);
  }
  else if (key == "pod_tol")
  {
    c.pod_tol = ParseDouble(key, v);
  }
  else if (key == "timing")
  {
    c.timing = ParseBool(key, v);
  }
  else if (key == "compare_cold")
  {
    c.compare_cold = ParseBool(key, v);
  }
  else if (key == "threads")
  {
    c.threads = ParseSmallInt(key, v);
  }
  else
  {
    throw ConfigError("config key '" + key + "': unknown key");
  }
}

void ValidateRunConfig(const RunConfig &c)
{
  Require(c.n_coarse_elements >= 2, "n_coarse_elements", "must be at least 2");
  Require(c.mesh_levels >= 1 && c.mesh_levels <= 12, "mesh_levels", "must be in [1, 12]");
  Require(!c.grid.empty(), "grid", "must list at least one axis");
  for (int g : c.grid)
  {
    Require(g >= 1, "grid", "every axis needs at least 1 point");
  }
  Require(c.grid_log.empty() || c.grid_log.size() == c.grid.size(), "grid_log",
          "must have one entry per grid axis");
  Require(c.mu_lower.size() == c.mu_upper.size(), "mu_lower",
          "mu_lower and mu_upper must have the same length");
  Require(c.mu_lower.empty() || c.mu_lower.size() == c.grid.size(), "mu_lower",
          "must have one entry per grid axis");
  for (std::size_t i = 0; i < c.mu_lower.size(); i++)
  {
    Require(c.mu_lower[i] <= c.mu_upper[i], "mu_upper", "upper bound below lower bound");
  }
  Require(c.tol > 0.0, "tol", "must be positive");
  Require(c.delta > 0.0 && c.delta < 1.0, "delta", "must lie in (0, 1)");
  Require(!c.deltas.empty(), "deltas", "must list at least one value");
  for (double d : c.deltas)
  {
    Require(d > 0.0 && d < 1.0, "deltas", "every value must lie in (0, 1)");
  }
  Require(c.n_max >= 1, "n_max", "must be at least 1");
  Require(c.m_factor >= 1, "m_factor", "must be at least 1");
  Require(c.n_test >= 1, "n_test", "must be at least 1");
  Require(c.final_time > 0.0, "final_time", "must be positive");
  Require(c.n_steps >= 1, "n_steps", "must be at least 1");
  Require(c.maxit >= 1, "maxit", "must be at least 1");
  Require(c.pod_tol > 0.0, "pod_tol", "must be positive");
  Require(c.threads >= 1, "threads", "must be at least 1");
}

RunConfig ParseRunConfig(const std::string &text)
{
  RunConfig c;
  std::stringstream ss(text);
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
    line = Trim(line);
    if (line.empty())
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    SetConfigValue(c, Trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  ValidateRunConfig(c);
  return c;
}

RunConfig LoadRunConfig(const std::string &path) { return ParseRunConfig(ReadTextFile(path)); }

std::string RunConfig::Canonical() const
{
  std::ostringstream s;
  std::string g, gl;
  for (std::size_t i = 0; i < grid.size(); i++)
  {
    g += (i ? "," : "") + std::to_string(grid[i]);
  }
  for (std::size_t i = 0; i < grid_log.size(); i++)
  {
    gl += std::string(i ? "," : "") + (grid_log[i] ? "on" : "off");
  }
  s << "model=" << model << "\n"
    << "n_coarse_elements=" << n_coarse_elements << "\n"
    << "mesh_levels=" << mesh_levels << "\n"
    << "mu_lower=" << Join(mu_lower) << "\n"
    << "mu_upper=" << Join(mu_upper) << "\n"
    << "grid=" << g << "\n"
    << "grid_log=" << gl << "\n"
    << "tol=" << Join({tol}) << "\n"
    << "delta=" << Join({delta}) << "\n"
    << "deltas=" << Join(deltas) << "\n"
    << "n_max=" << n_max << "\n"
    << "m_factor=" << m_factor << "\n"
    << "variant=" << ToString(variant) << "\n"
    << "seed=" << seed << "\n"
    << "n_test=" << n_test << "\n"
    << "final_time=" << Join({final_time}) << "\n"
    << "n_steps=" << n_steps << "\n"
    << "maxit=" << maxit << "\n"
    << "pod_tol=" << Join({pod_tol}) << "\n";
  return s.str();
}

std::uint64_t RunConfig::Hash() const
{
  const std::string c = Canonical();
  return Fnv1a(c.data(), c.size());
}

}  // namespace morforge
