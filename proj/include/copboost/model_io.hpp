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

#include <iosfwd>
#include <string>

#include "copboost/boosting.hpp"

namespace copboost {

inline constexpr int kModelFormatVersion = 1;

// Provenance stored next to the fitted model.
struct ModelMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string label;
  int m_stop = 0;  // iterations run before truncation
  int m_opt = 0;
};

// Versioned JSON text. Doubles are written in shortest round-trip form, so
// loading reproduces every coefficient exactly.
void save_model(std::ostream& out, const FittedModel& model, const ModelMeta& meta,
                const BoostTrace* trace = nullptr);
void save_model_file(const std::string& path, const FittedModel& model, const ModelMeta& meta,
                     const BoostTrace* trace = nullptr);
FittedModel load_model(std::istream& in, ModelMeta* meta = nullptr);
FittedModel load_model_file(const std::string& path, ModelMeta* meta = nullptr);

// Trace CSV: iteration,parameter,learner,train_risk,oob_risk, with an
// iteration-0 row holding the risks at the offsets.
void write_trace_csv(std::ostream& out, const FittedModel& model, const BoostTrace& trace);
BoostTrace read_trace_csv(std::istream& in);

}  // namespace copboost
