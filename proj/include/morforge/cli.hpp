// Copyright MorForge Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MORFORGE_CLI_HPP
#define MORFORGE_CLI_HPP

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "morforge/config.hpp"
#include "morforge/creep_model.hpp"
#include "morforge/steady_model.hpp"

namespace morforge
{

enum ExitCode
{
  kExitOk = 0,
  kExitUsage = 2,
  kExitNumerical = 3,
  kExitIo = 4
};

// Models on every mesh level of the configured hierarchy (coarsest first).
std::vector<std::shared_ptr<const SteadyModel>> SteadyHierarchy(const RunConfig &config);
std::vector<std::shared_ptr<const CreepBarModel>> CreepHierarchy(const RunConfig &config);
std::vector<bool> GridLogSpacing(const RunConfig &config);

// Entry point of the `morforge` executable; output goes to the given streams.
int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace morforge

#endif  // MORFORGE_CLI_HPP
