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

#include "copboost/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <nlohmann/json.hpp>
#include <sstream>

#include "copboost/error.hpp"
#include "copboost/scoring.hpp"

namespace copboost {

using nlohmann::json;

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

std::vector<int> columns(const json& j, const char* key, const std::string& where) {
  const auto v = get<std::vector<int>>(j, key, where, {});
  for (int c : v)
    if (c < 1) throw ConfigError(where + "." + key + ": covariates are numbered from 1");
  return v;
}

MarginFamily parse_margin(const json& j, const std::string& where) {
  only_keys(j, where, {"family", "link"});
  const Family f = parse_family(get<std::string>(j, "family", where, ""));
  const Link link = parse_link(get<std::string>(j, "link", where, "logit"));
  if (j.contains("link") && f != Family::bernoulli)
    throw ConfigError(where + ".link applies to the bernoulli family only");
  return MarginFamily::make(f, link);
}

ModelSpec parse_model(const json& j) {
  only_keys(j, "model", {"kind", "margin1", "margin2", "copula"});
  for (const char* k : {"kind", "margin1", "margin2", "copula"})
    if (!j.contains(k)) throw ConfigError(std::string("model.") + k + " is required");
  const json& c = j.at("copula");
  only_keys(c, "model.copula", {"family", "rotation"});
  const CopulaSpec cop = CopulaSpec::make(
      parse_copula_family(get<std::string>(c, "family", "model.copula", "")),
      get<int>(c, "rotation", "model.copula", 0));
  return ModelSpec::make(parse_pair_kind(get<std::string>(j, "kind", "model", "")),
                         parse_margin(j.at("margin1"), "model.margin1"),
                         parse_margin(j.at("margin2"), "model.margin2"), cop);
}

DgpSpec parse_simulate(const json& j, const std::optional<ModelSpec>& model) {
  only_keys(j, "simulate",
            {"preset", "p", "n", "n_train", "n_mstop", "n_test", "covariates", "rho", "eta"});
  const std::string where = "simulate";
  const Preset preset = parse_preset(get<std::string>(j, "preset", where, "s1-binary-linear"));
  const int p = get<int>(j, "p", where, 10);
  if (p < 1) throw ConfigError("simulate.p must be at least 1");
  DgpSpec d;
  if (preset == Preset::custom) {
    if (!model) throw ConfigError("a custom simulation needs a model block");
    if (!j.contains("eta")) throw ConfigError("a custom simulation needs simulate.eta");
    d.preset = preset;
    d.p = p;
    d.model = *model;
    d.covariates = CovariateMode::iid_uniform01;
  } else {
    if (j.contains("eta")) throw ConfigError("simulate.eta is only for the custom preset");
    d = make_dgp(preset, p);
    if (model && !same_spec(*model, d.model))
      throw ConfigError("the model block does not match preset " + std::string(preset_name(preset)));
  }
  if (j.contains("eta")) d.eta = get<std::vector<std::string>>(j, "eta", where, {});
  if (j.contains("covariates"))
    d.covariates = parse_covariate_mode(get<std::string>(j, "covariates", where, ""));
  d.rho = get<double>(j, "rho", where, 0.5);
  if (j.contains("n")) {
    if (j.contains("n_train") || j.contains("n_mstop") || j.contains("n_test"))
      throw ConfigError("give either simulate.n or the partition sizes, not both");
    const auto n = get<std::size_t>(j, "n", where, 3500);
    // Same 1000:1500:1000 proportions as the default.
    d.n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * 2.0 / 7.0));
    d.n_mstop = static_cast<std::size_t>(std::llround(static_cast<double>(n) * 3.0 / 7.0));
    d.n_test = n - d.n_train - d.n_mstop;
  } else {
    d.n_train = get<std::size_t>(j, "n_train", where, 1000);
    d.n_mstop = get<std::size_t>(j, "n_mstop", where, 1500);
    d.n_test = get<std::size_t>(j, "n_test", where, 1000);
  }
  TruePredictor check(d);  // validates the expressions against p
  (void)check;
  return d;
}

LearnerConfig parse_learner(const json& j, const std::string& where, const LearnerConfig& base,
                            bool allow_nested) {
  if (allow_nested) {
    only_keys(j, where,
              {"type", "df", "n_inner_knots", "degree", "diff_order", "covariates", "categorical",
               "intercept", "per_parameter"});
  } else {
    only_keys(j, where,
              {"type", "df", "n_inner_knots", "degree", "diff_order", "covariates", "categorical",
               "intercept"});
  }
  LearnerConfig l = base;
  l.type = get<std::string>(j, "type", where, base.type);
  if (l.type != "linear" && l.type != "pspline" && l.type != "none")
    throw ConfigError(where + ".type must be linear, pspline or none");
  l.df = get<double>(j, "df", where, base.df);
  l.n_inner_knots = get<int>(j, "n_inner_knots", where, base.n_inner_knots);
  l.degree = get<int>(j, "degree", where, base.degree);
  l.diff_order = get<int>(j, "diff_order", where, base.diff_order);
  if (j.contains("covariates")) l.covariates = columns(j, "covariates", where);
  if (j.contains("categorical")) l.categorical = columns(j, "categorical", where);
  l.intercept = get<bool>(j, "intercept", where, base.intercept);
  if (l.df < 0.0) throw ConfigError(where + ".df must be non-negative");
  if (l.n_inner_knots < 1 || l.degree < 1 || l.diff_order < 1 || l.diff_order > l.degree + 1)
    throw ConfigError(where + ": invalid spline settings");
  return l;
}

}  // namespace


ModelSpec RunConfig::fit_model() const {
  ModelSpec m;
  if (model) m = *model;
  else if (simulate) m = simulate->model;
  else throw ConfigError("the config needs a model block or a simulate preset");
  if (univariate) m.copula = CopulaSpec::make(CopulaFamily::gauss);
  return m;
}

RunConfig default_config() {
  RunConfig c = parse_config("{}");
  return c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(j, "config",
            {"model", "simulate", "univariate", "boost", "learners", "score", "seed", "label",
             "predict"});
  RunConfig c;
  c.hash = fnv1a_hex(j.dump());
  if (j.contains("model")) c.model = parse_model(j.at("model"));
  if (j.contains("simulate")) c.simulate = parse_simulate(j.at("simulate"), c.model);
  c.univariate = get<bool>(j, "univariate", "config", false);
  c.seed = get<std::uint64_t>(j, "seed", "config", 1);
  if (c.simulate) c.simulate->seed = c.seed;
  c.label = get<std::string>(j, "label", "config", c.univariate ? "univariate" : "copula");
  if (j.contains("boost")) {
    const json& b = j.at("boost");
    only_keys(b, "boost", {"s_step", "m_stop", "stabilization", "threads", "truncate"});
    c.boost.s_step = get<double>(b, "s_step", "boost", 0.1);
    c.boost.m_stop = get<int>(b, "m_stop", "boost", 100);
    c.boost.stabilization = parse_stabilization(get<std::string>(b, "stabilization", "boost", "L2"));
    c.boost.threads = get<int>(b, "threads", "boost", 1);
    const std::string t = get<std::string>(b, "truncate", "boost", "mstop_opt");
    if (t != "mstop_opt" && t != "none") throw ConfigError("boost.truncate must be mstop_opt or none");
    c.truncate_at_mopt = t == "mstop_opt";
  }
  c.boost.validate();
  if (j.contains("learners")) {
    const json& l = j.at("learners");
    c.learners = parse_learner(l, "learners", LearnerConfig{}, true);
    if (l.contains("per_parameter")) {
      const json& pp = l.at("per_parameter");
      if (!pp.is_object()) throw ConfigError("learners.per_parameter must be an object");
      for (const auto& [name, v] : pp.items())
        c.per_parameter[name] = parse_learner(v, "learners.per_parameter." + name, c.learners, false);
    }
  }
  if (j.contains("score")) {
    const json& s = j.at("score");
    only_keys(s, "score", {"samples"});
    c.score_samples = get<int>(s, "samples", "score", 1000);
    if (c.score_samples < 2) throw ConfigError("score.samples must be at least 2");
  }
  if (j.contains("predict")) {
    const json& p = j.at("predict");
    only_keys(p, "predict", {"at_iteration"});
    if (p.contains("at_iteration")) c.at_iteration = get<int>(p, "at_iteration", "predict", 0);
  }
  if (c.model || c.simulate) {
    const ModelSpec m = c.fit_model();
    for (const auto& [name, _] : c.per_parameter) {
      bool found = false;
      for (int k = 0; k < m.n_params(); ++k) found = found || m.param_name(k) == name;
      if (!found) throw ConfigError("learners.per_parameter names unknown parameter '" + name + "'");
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

LearnerSet build_learners(const RunConfig& config, const ModelSpec& spec, int p) {
  LearnerSet out(spec.n_params());
  for (int k = 0; k < spec.n_params(); ++k) {
    const auto it = config.per_parameter.find(spec.param_name(k));
    const LearnerConfig& lc = it != config.per_parameter.end() ? it->second : config.learners;
    if (lc.type == "none") continue;
    if (config.univariate && k == spec.copula_index()) continue;
    if (lc.intercept) out[k].push_back(BaseLearnerDef::intercept());
    std::vector<int> cols = lc.covariates;
    if (cols.empty())
      for (int c = 1; c <= p; ++c) cols.push_back(c);
    for (int c : cols) {
      if (c > p)
        throw ConfigError("learner covariate x" + std::to_string(c) + " exceeds the " +
                          std::to_string(p) + " data columns");
      const bool categorical =
          std::find(lc.categorical.begin(), lc.categorical.end(), c) != lc.categorical.end();
      BaseLearnerDef def;
      if (categorical) {
        def = BaseLearnerDef::categorical(c - 1, lc.df);
      } else if (lc.type == "pspline") {
        def = BaseLearnerDef::pspline(c - 1, lc.df > 0 ? lc.df : 4.0);
        def.n_inner_knots = lc.n_inner_knots;
        def.degree = lc.degree;
        def.diff_order = lc.diff_order;
      } else {
        def = BaseLearnerDef::linear(c - 1);
      }
      out[k].push_back(def);
    }
  }
  return out;
}

}  // namespace copboost
