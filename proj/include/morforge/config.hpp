// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_CONFIG_HPP
#define MORFORGE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "morforge/driver.hpp"

namespace morforge
{

//
// Flat key=value run configuration; '#' starts a comment. Every numeric range is checked at
// parse time and errors name the offending key.
//
struct RunConfig
{
  std::string model = "reaction_diffusion";
  int n_coarse_elements = 50;
  int mesh_levels = 2;
  // Empty means the model's default box.
  std::vector<double> mu_lower, mu_upper;
  std::vector<int> grid{10, 10};
  std::vector<bool> grid_log;
  double tol = 1e-3;
  double delta = 1e-4;
  std::vector<double> deltas{1e-2, 1e-4, 1e-6};
  int n_max = 30;
  int m_factor = 2;
  GreedyVariant variant = GreedyVariant::kIncremental;
  std::uint64_t seed = 1;
  int n_test = 20;
  std::string output_dir = "out";
  double final_time = 5.0;
  int n_steps = 20;
  int maxit = 15;
  double pod_tol = 1e-5;
  bool timing = true;
  bool compare_cold = true;
  int threads = 1;

  // Canonical key=value text of every field; its hash tags ROM bundles.
  std::string Canonical() const;
  std::uint64_t Hash() const;
};

RunConfig ParseRunConfig(const std::string &text);
RunConfig LoadRunConfig(const std::string &path);

// Applies one key=value assignment (used by the parser and by CLI overrides).
void SetConfigValue(RunConfig &config, const std::string &key, const std::string &value);
void ValidateRunConfig(const RunConfig &config);

}  // namespace morforge

#endif  // MORFORGE_CONFIG_HPP
