// Copyright 2026 The Symile Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "run.hpp"

namespace symile::cli {

/// Parses `args` (args[0] is the program name) and runs the subcommand.
/// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SweepOptions {
  std::filesystem::path out_dir;
  std::size_t jobs = 1;
  std::size_t bootstrap = 10;
  std::vector<int> info_dims = {1, 5};
};

/// Runs every (p_hat, objective, seed) cell not already present under
/// out_dir/cells, then writes accuracy.csv and information.csv.
int cmd_reproduce_fig3(const SweepSpec& spec, const SweepOptions& opts, std::ostream& log);

}  // namespace symile::cli
