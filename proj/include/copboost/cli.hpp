/*
 * Copyright 2026 The copboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace copboost {

struct CommandOptions {
  std::string config;
  std::string data;
  std::string model;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

// Each command throws copboost::Error subclasses on failure.
void cmd_simulate(const CommandOptions& opt);
void cmd_fit(const CommandOptions& opt);
int cmd_tune(const CommandOptions& opt);
void cmd_predict(const CommandOptions& opt);
void cmd_score(const CommandOptions& opt);
void cmd_report(const CommandOptions& opt);

// Full command line front end; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace copboost
