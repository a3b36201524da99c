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

#include <span>
#include <vector>

namespace copboost::stats {

double mean(std::span<const double> x);
// Unbiased sample variance.
double variance(std::span<const double> x);
double pearson(std::span<const double> x, std::span<const double> y);
// Kendall's tau-b by Knight's O(n log n) algorithm.
double kendall_tau(std::span<const double> x, std::span<const double> y);
// sup |F_n(x) - x| against the Uniform(0,1) CDF.
double ks_uniform(std::span<const double> u);
double median(std::vector<double> x);
// Average ranks (1-based), ties receive the mid rank.
std::vector<double> midranks(std::span<const double> x);

}  // namespace copboost::stats
