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

#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace copboost {

// Arithmetic over covariates x1..xp: + - * / ^, unary minus, parentheses,
// numeric literals, pi, and the functions sin cos tan exp log sqrt tanh abs.
// '^' binds tighter than unary minus and is right associative.
class Expression {
 public:
  // Throws ConfigError on syntax errors or a variable beyond x{p}.
  static Expression parse(const std::string& text, int p);

  double eval(std::span<const double> x) const;
  // 0-based covariate columns the expression reads.
  const std::set<int>& variables() const { return variables_; }
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
  std::set<int> variables_;
};

}  // namespace copboost
