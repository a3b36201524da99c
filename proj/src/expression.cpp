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

#include "copboost/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "copboost/error.hpp"

namespace copboost {

enum class Op { constant, variable, neg, add, sub, mul, div, pow, call };
enum class Fn { sin, cos, tan, exp, log, sqrt, tanh, abs };

struct Expression::Node {
  Op op = Op::constant;
  double value = 0.0;
  int index = 0;
  Fn fn = Fn::sin;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr leaf_constant(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->value = v;
  return n;
}

NodePtr binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  Parser(const std::string& text, int p, std::set<int>& vars) : s_(text), p_(p), vars_(vars) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("expression '" + s_ + "': " + why + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+')) lhs = binary(Op::add, lhs, term());
      else if (accept('-')) lhs = binary(Op::sub, lhs, term());
      else return lhs;
    }
  }
  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*')) lhs = binary(Op::mul, lhs, unary());
      else if (accept('/')) lhs = binary(Op::div, lhs, unary());
      else return lhs;
    }
  }
  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::neg;
      n->a = unary();
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary(Op::pow, base, unary());
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (res.ec != std::errc()) fail("bad number");
      pos_ = static_cast<std::size_t>(res.ptr - s_.data());
      return leaf_constant(v);
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected character");
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string id = s_.substr(start, pos_ - start);
    if (id == "pi") return leaf_constant(std::numbers::pi);
    if (id.size() > 1 && id[0] == 'x' &&
        id.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int j = std::stoi(id.substr(1));
      if (j < 1 || j > p_) fail("covariate " + id + " out of range 1.." + std::to_string(p_));
      vars_.insert(j - 1);
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::variable;
      n->index = j - 1;
      return n;
    }
    static const std::pair<const char*, Fn> fns[] = {
        {"sin", Fn::sin},   {"cos", Fn::cos},   {"tan", Fn::tan},   {"exp", Fn::exp},
        {"log", Fn::log},   {"sqrt", Fn::sqrt}, {"tanh", Fn::tanh}, {"abs", Fn::abs}};
    for (const auto& [name, fn] : fns) {
      if (id != name) continue;
      if (!accept('(')) fail("expected '(' after " + id);
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::call;
      n->fn = fn;
      n->a = expr();
      if (!accept(')')) fail("missing ')'");
      return n;
    }
    pos_ = start;
    fail("unknown name '" + id + "'");
  }

  const std::string& s_;
  int p_;
  std::set<int>& vars_;
  std::size_t pos_ = 0;
};

double apply(Fn fn, double v) {
  switch (fn) {
    case Fn::sin: return std::sin(v);
    case Fn::cos: return std::cos(v);
    case Fn::tan: return std::tan(v);
    case Fn::exp: return std::exp(v);
    case Fn::log: return std::log(v);
    case Fn::sqrt: return std::sqrt(v);
    case Fn::tanh: return std::tanh(v);
    case Fn::abs: return std::abs(v);
  }
  return v;
}

double eval_node(const Expression::Node& n, std::span<const double> x) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return x[static_cast<std::size_t>(n.index)];
    case Op::neg: return -eval_node(*n.a, x);
    case Op::add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Op::sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Op::mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Op::div: return eval_node(*n.a, x) / eval_node(*n.b, x);
    case Op::pow: return std::pow(eval_node(*n.a, x), eval_node(*n.b, x));
    case Op::call: return apply(n.fn, eval_node(*n.a, x));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& text, int p) {
  Expression e;
  e.text_ = text;
  Parser parser(e.text_, p, e.variables_);
  e.root_ = parser.parse();
  return e;
}

double Expression::eval(std::span<const double> x) const { return eval_node(*root_, x); }

}  // namespace copboost
