// Copyright 2026 The Dualchain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DUALCHAIN_CLI_HPP_
#define DUALCHAIN_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "dualchain/chainsim.hpp"
#include "dualchain/core.hpp"
#include "dualchain/dynamics.hpp"

namespace dualchain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

// Runs one command line. Primary output goes to `out` unless --out names a
// file; the config echo, logs and error JSON go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);
int dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

// Input loaders, exposed for tests. All throw dualchain::Error.
GameConfig load_config(const std::string& path, bool renormalize = false);
GameConfig parse_config(const std::string& json_text, bool renormalize = false);
Schedule load_schedule(const std::string& path, const std::string& field);
std::vector<MinerAgent> load_agents(const std::string& path);
MiningState parse_state(const std::string& text, const std::string& field);

}  // namespace dualchain::cli

#endif  // DUALCHAIN_CLI_HPP_
