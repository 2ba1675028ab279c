// Copyright 2026 The convduel Authors.
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

#ifndef CONVDUEL_CLI_COMMANDS_HPP_
#define CONVDUEL_CLI_COMMANDS_HPP_

#include <ostream>

namespace convduel::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

// Entry point of the convduel tool: subcommands synth, prep, run, sweep and
// plot. Machine-readable summaries go to `out`, progress and errors to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace convduel::cli

#endif  // CONVDUEL_CLI_COMMANDS_HPP_
