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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copboost/boosting.hpp"
#include "copboost/simulate.hpp"

namespace copboost {

// Candidate learners for one parameter. Covariates are 1-based as in the
// CSV header; an empty list means every column.
struct LearnerConfig {
  std::string type = "linear";  // linear | pspline | none
  double df = 0.0;
  int n_inner_knots = 20;
  int degree = 3;
  int diff_order = 2;
  std::vector<int> covariates;
  std::vector<int> categorical;  // columns fitted with a ridge on their levels
  bool intercept = false;
};

struct RunConfig {
  std::optional<ModelSpec> model;
  std::optional<DgpSpec> simulate;
  bool univariate = false;
  BoostConfig boost;
  bool truncate_at_mopt = true;
  LearnerConfig learners;
  std::map<std::string, LearnerConfig> per_parameter;
  int score_samples = 1000;
  std::uint64_t seed = 1;
  std::string label = "copula";
  std::optional<int> at_iteration;
  std::string hash;  // FNV-1a of the canonical JSON text

  // The model to fit: the explicit model block, else the preset's, with the
  // copula replaced by an independence Gauss copula in univariate mode.
  ModelSpec fit_model() const;
};

// Throws ConfigError on malformed JSON, unknown keys or invalid values.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
// Defaults for every field, used when no config file is given.
RunConfig default_config();

LearnerSet build_learners(const RunConfig& config, const ModelSpec& spec, int p);

std::string fnv1a_hex(const std::string& text);

}  // namespace copboost
