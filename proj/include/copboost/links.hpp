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

#include <string>
#include <string_view>

namespace copboost {

// Link g maps a constrained parameter onto the predictor scale; the response
// h = g^{-1} maps back.
enum class Link { identity, log, logit, probit, cloglog };

Link parse_link(std::string_view name);
std::string_view link_name(Link link);

double response_apply(Link link, double eta);
double link_apply(Link link, double value);
// dh/deta evaluated at eta.
double response_derivative(Link link, double eta);

}  // namespace copboost
