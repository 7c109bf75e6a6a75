// Copyright 2026 The cbfdt Authors
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

// Subcommands of the cbfdt executable. Each returns a process exit code.

#ifndef CBFDT_CLI_COMMANDS_HPP_
#define CBFDT_CLI_COMMANDS_HPP_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cbfdt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolation = 2;

// ||L_g h|| level used to locate entry into the singular region in reports.
inline constexpr double kSingularEntryLevel = 1e-3;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

int simulate(const std::string& config_path, const std::optional<std::string>& out_dir, bool strict,
             Streams io);
int reproduce(const std::string& preset_name, const std::string& out_dir, bool strict, Streams io);
int check_cbf(const std::string& config_path, int grid, double eps,
              const std::optional<std::string>& out_dir, Streams io);
int sweep(const std::string& config_path, const std::vector<double>& dts,
          const std::optional<std::string>& out_dir, Streams io);

// Parses argv and dispatches.
int run_cli(int argc, const char* const* argv, Streams io);

}  // namespace cbfdt::cli

#endif  // CBFDT_CLI_COMMANDS_HPP_
