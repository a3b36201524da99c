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

#include "copboost/model_io.hpp"

#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "copboost/data.hpp"
#include "copboost/error.hpp"

namespace copboost {

using nlohmann::json;

namespace {

json margin_json(const MarginFamily& m) {
  json links = json::array();
  for (int k = 0; k < m.n_params; ++k) links.push_back(std::string(link_name(m.links[k])));
  return {{"family", std::string(family_name(m.family))}, {"links", links}};
}

MarginFamily margin_from(const json& j) {
  MarginFamily m = MarginFamily::make(parse_family(j.at("family").get<std::string>()));
  const auto links = j.at("links").get<std::vector<std::string>>();
  if (static_cast<int>(links.size()) != m.n_params) throw InputError("model file: bad link list");
  for (int k = 0; k < m.n_params; ++k) m.links[k] = parse_link(links[k]);
  return m;
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void save_model(std::ostream& out, const FittedModel& model, const ModelMeta& meta,
                const BoostTrace* trace) {
  const ModelSpec& s = model.spec;
  json j;
  j["format"] = "copboost-model";
  j["version"] = kModelFormatVersion;
  j["meta"] = {{"config_hash", meta.config_hash}, {"seed", meta.seed},     {"label", meta.label},
               {"m_stop", meta.m_stop},           {"m_opt", meta.m_opt}};
  j["spec"] = {{"kind", std::string(pair_kind_name(s.kind))},
               {"margin1", margin_json(s.margin1)},
               {"margin2", margin_json(s.margin2)},
               {"copula",
                {{"family", std::string(copula_family_name(s.copula.family))},
                 {"rotation", s.copula.rotation}}}};
  j["n_covariates"] = model.n_covariates;
  j["m_used"] = model.m_used;
  j["offsets"] = vec_json(model.offsets);
  json params = json::array();
  for (int k = 0; k < s.n_params(); ++k) {
    json learners = json::array();
    for (std::size_t l = 0; l < model.learners[k].size(); ++l) {
      const LearnerBasis& b = model.learners[k][l];
      learners.push_back({{"kind", std::string(learner_kind_name(b.def.kind))},
                          {"covariate", b.def.covariate},
                          {"n_inner_knots", b.def.n_inner_knots},
                          {"degree", b.def.degree},
                          {"diff_order", b.def.diff_order},
                          {"df", b.def.df},
                          {"lo", b.lo},
                          {"hi", b.hi},
                          {"knots", b.knots},
                          {"levels", b.levels},
                          {"aggregated", vec_json(model.aggregated[k][l])}});
    }
    json ensemble = json::array();
    for (const auto& e : model.ensembles[k])
      ensemble.push_back(
          {{"iteration", e.iteration}, {"learner", e.learner}, {"coefficients", vec_json(e.coefficients)}});
    params.push_back({{"name", s.param_name(k)}, {"learners", learners}, {"ensemble", ensemble}});
  }
  j["parameters"] = params;
  if (trace) {
    json it = json::array();
    for (const auto& r : trace->iterations)
      it.push_back({r.parameter, r.learner, r.train_risk, r.oob_risk});
    j["trace"] = {{"initial_train_risk", trace->initial_train_risk},
                  {"initial_oob_risk", trace->initial_oob_risk},
                  {"iterations", it}};
  }
  out << j.dump(1) << '\n';
}

void save_model_file(const std::string& path, const FittedModel& model, const ModelMeta& meta,
                     const BoostTrace* trace) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write model file '" + path + "'");
  save_model(out, model, meta, trace);
  if (!out) throw InputError("write to '" + path + "' failed");
}

FittedModel load_model(std::istream& in, ModelMeta* meta) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "copboost-model")
      throw InputError("not a copboost model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw InputError("unsupported model file version " + std::to_string(version));
    const json& sj = j.at("spec");
    FittedModel m;
    m.spec = ModelSpec::make(parse_pair_kind(sj.at("kind").get<std::string>()),
                             margin_from(sj.at("margin1")), margin_from(sj.at("margin2")),
                             CopulaSpec::make(parse_copula_family(sj.at("copula").at("family").get<std::string>()),
                                              sj.at("copula").at("rotation").get<int>()));
    const int K = m.spec.n_params();
    m.n_covariates = j.at("n_covariates").get<int>();
    m.m_used = j.at("m_used").get<int>();
    m.offsets = vec_from(j.at("offsets"));
    const json& params = j.at("parameters");
    if (m.offsets.size() != K || static_cast<int>(params.size()) != K)
      throw InputError("model file: parameter count does not match the spec");
    m.learners.resize(K);
    m.aggregated.resize(K);
    m.ensembles.resize(K);
    for (int k = 0; k < K; ++k) {
      for (const json& lj : params[k].at("learners")) {
        LearnerBasis b;
        b.def.kind = parse_learner_kind(lj.at("kind").get<std::string>());
        b.def.covariate = lj.at("covariate").get<int>();
        b.def.n_inner_knots = lj.at("n_inner_knots").get<int>();
        b.def.degree = lj.at("degree").get<int>();
        b.def.diff_order = lj.at("diff_order").get<int>();
        b.def.df = lj.at("df").get<double>();
        b.lo = lj.at("lo").get<double>();
        b.hi = lj.at("hi").get<double>();
        b.knots = lj.at("knots").get<std::vector<double>>();
        b.levels = lj.at("levels").get<std::vector<double>>();
        Eigen::VectorXd agg = vec_from(lj.at("aggregated"));
        if (agg.size() != b.dim()) throw InputError("model file: coefficient length mismatch");
        m.learners[k].push_back(std::move(b));
        m.aggregated[k].push_back(std::move(agg));
      }
      for (const json& ej : params[k].at("ensemble")) {
        EnsembleEntry e;
        e.iteration = ej.at("iteration").get<int>();
        e.learner = ej.at("learner").get<int>();
        e.coefficients = vec_from(ej.at("coefficients"));
        if (e.learner < 0 || e.learner >= static_cast<int>(m.learners[k].size()) ||
            e.coefficients.size() != m.learners[k][e.learner].dim())
          throw InputError("model file: bad ensemble entry");
        m.ensembles[k].push_back(std::move(e));
      }
    }
    if (meta) {
      const json& mj = j.at("meta");
      meta->config_hash = mj.at("config_hash").get<std::string>();
      meta->seed = mj.at("seed").get<std::uint64_t>();
      meta->label = mj.at("label").get<std::string>();
      meta->m_stop = mj.at("m_stop").get<int>();
      meta->m_opt = mj.at("m_opt").get<int>();
    }
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  } catch (const ConfigError& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

FittedModel load_model_file(const std::string& path, ModelMeta* meta) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  return load_model(in, meta);
}

void write_trace_csv(std::ostream& out, const FittedModel& model, const BoostTrace& trace) {
  out << "iteration,parameter,learner,train_risk,oob_risk\n";
  out << "0,offset,offset," << format_double(trace.initial_train_risk) << ','
      << format_double(trace.initial_oob_risk) << '\n';
  for (std::size_t m = 0; m < trace.iterations.size(); ++m) {
    const auto& r = trace.iterations[m];
    out << m + 1 << ',' << model.spec.param_name(r.parameter) << ','
        << model.learners[r.parameter][r.learner].def.name() << ',' << format_double(r.train_risk)
        << ',' << format_double(r.oob_risk) << '\n';
  }
}

BoostTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("iteration,parameter,learner,train_risk,oob_risk", 0) != 0)
    throw InputError("trace CSV header must be iteration,parameter,learner,train_risk,oob_risk");
  BoostTrace t;
  t.has_oobag = true;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 5) throw InputError("trace row " + std::to_string(row) + ": expected 5 fields");
    try {
      const int it = std::stoi(f[0]);
      const double tr = std::stod(f[3]), oob = std::stod(f[4]);
      if (it == 0) {
        t.initial_train_risk = tr;
        t.initial_oob_risk = oob;
        continue;
      }
      if (it != static_cast<int>(t.iterations.size()) + 1)
        throw InputError("trace row " + std::to_string(row) + ": iterations out of order");
      IterationRecord r;
      r.train_risk = tr;
      r.oob_risk = oob;
      t.iterations.push_back(r);
    } catch (const std::logic_error&) {
      throw InputError("trace row " + std::to_string(row) + ": not a number");
    }
  }
  return t;
}

}  // namespace copboost
