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

#include "copboost/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "copboost/config.hpp"
#include "copboost/error.hpp"
#include "copboost/model_io.hpp"
#include "copboost/scoring.hpp"
#include "copboost/stats.hpp"

namespace copboost {

namespace fs = std::filesystem;

namespace {

RunConfig resolve_config(const CommandOptions& opt) {
  RunConfig c = opt.config.empty() ? default_config() : load_config(opt.config);
  if (opt.seed) {
    c.seed = *opt.seed;
    if (c.simulate) c.simulate->seed = *opt.seed;
  }
  if (opt.threads) {
    c.boost.threads = *opt.threads;
    c.boost.validate();
  }
  return c;
}

void require(const std::string& value, const char* flag, const char* command) {
  if (value.empty()) throw ConfigError(std::string(command) + " needs " + flag);
}

// data.csv -> data.<tag>.csv
std::string sibling(const std::string& path, const std::string& tag) {
  fs::path p(path);
  const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
  p.replace_extension();
  return p.string() + "." + tag + (tag.find('.') == std::string::npos ? ext : "");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  return out;
}

std::string cell(double v) { return std::isnan(v) ? "NA" : format_double(v); }

std::string covariate_list(const std::set<int>& s) {
  std::string out;
  for (int c : s) out += (out.empty() ? "x" : " x") + std::to_string(c + 1);
  return out;
}

// The library maps unseen factor levels to a zero effect; on the command line
// they are a data error pointing at the offending row.
void check_levels(const FittedModel& model, const Dataset& data) {
  for (const auto& per_param : model.learners) {
    for (const LearnerBasis& b : per_param) {
      if (b.def.kind != LearnerKind::categorical) continue;
      const int j = b.def.covariate;
      for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
        const double v = data.x(i, j);
        if (!std::binary_search(b.levels.begin(), b.levels.end(), v))
          throw InputError("row " + std::to_string(i + 1) + ", column x" + std::to_string(j + 1) +
                           ": level " + format_double(v) + " was not seen in training");
      }
    }
  }
}

}  // namespace

void cmd_simulate(const CommandOptions& opt) {
  require(opt.out, "--out", "simulate");
  const RunConfig c = resolve_config(opt);
  if (!c.simulate) throw ConfigError("simulate needs a simulate block in the config");
  const DgpSpec& dgp = *c.simulate;
  const Dataset data = simulate(dgp, c.boost.threads);
  write_csv_file(opt.out, data);

  const Eigen::MatrixXd eta = true_eta(dgp, data.x);
  {
    std::ofstream out = open_out(sibling(opt.out, "truth"));
    out << "row";
    for (int k = 0; k < dgp.model.n_params(); ++k) out << ",eta_" << dgp.model.param_name(k);
    out << '\n';
    for (Eigen::Index i = 0; i < eta.rows(); ++i) {
      out << i + 1;
      for (Eigen::Index k = 0; k < eta.cols(); ++k) out << ',' << format_double(eta(i, k));
      out << '\n';
    }
  }
  {
    std::ofstream out = open_out(sibling(opt.out, "informative"));
    out << "parameter,covariates\n";
    const auto inf = TruePredictor(dgp).informative();
    for (int k = 0; k < dgp.model.n_params(); ++k)
      out << dgp.model.param_name(k) << ',' << covariate_list(inf[k]) << '\n';
  }
  std::cout << "simulated " << data.n() << " rows (" << data.count(Partition::train) << " train, "
            << data.count(Partition::mstop) << " mstop, " << data.count(Partition::test)
            << " test) from " << preset_name(dgp.preset) << " to " << opt.out << '\n';
}

void cmd_fit(const CommandOptions& opt) {
  require(opt.data, "--data", "fit");
  require(opt.model, "--model", "fit");
  const RunConfig c = resolve_config(opt);
  const Dataset data = read_csv_file(opt.data);
  const ModelSpec spec = c.fit_model();
  const LearnerSet learners = build_learners(c, spec, data.p());
  const FitResult r = boost_fit(spec, data, learners, c.boost);
  const int m_opt = r.trace.has_oobag ? tune_mstop(r.trace) : c.boost.m_stop;
  const FittedModel saved =
      c.truncate_at_mopt && r.trace.has_oobag ? r.model.truncated(m_opt) : r.model;
  ModelMeta meta{c.hash, c.seed, c.label, c.boost.m_stop, m_opt};
  save_model_file(opt.model, saved, meta, &r.trace);
  const std::string trace_path = opt.out.empty() ? sibling(opt.model, "trace.csv") : opt.out;
  std::ofstream tout = open_out(trace_path);
  write_trace_csv(tout, r.model, r.trace);
  std::cout << "fitted " << spec.n_params() << " parameters on " << data.count(Partition::train)
            << " rows; m_stop " << c.boost.m_stop << ", m_opt " << m_opt << ", saved at "
            << saved.m_used << " iterations to " << opt.model << '\n';
}

int cmd_tune(const CommandOptions& opt) {
  require(opt.data, "--data (a trace CSV)", "tune");
  std::ifstream in(opt.data);
  if (!in) throw InputError("cannot open trace '" + opt.data + "'");
  const int m = tune_mstop(read_trace_csv(in));
  if (!opt.out.empty()) open_out(opt.out) << "m_opt\n" << m << '\n';
  std::cout << m << '\n';
  return m;
}

void cmd_predict(const CommandOptions& opt) {
  require(opt.data, "--data", "predict");
  require(opt.model, "--model", "predict");
  require(opt.out, "--out", "predict");
  const RunConfig c = resolve_config(opt);
  const FittedModel model = load_model_file(opt.model);
  const Dataset data = read_csv_file(opt.data);
  check_levels(model, data);
  const Prediction p = predict(model, data.x, c.at_iteration);
  std::ofstream out = open_out(opt.out);
  const int K = model.spec.n_params();
  out << "row";
  for (int k = 0; k < K; ++k) out << ",eta_" << model.spec.param_name(k);
  for (int k = 0; k < K; ++k) out << ',' << model.spec.param_name(k);
  out << '\n';
  for (Eigen::Index i = 0; i < p.eta.rows(); ++i) {
    out << i + 1;
    for (int k = 0; k < K; ++k) out << ',' << format_double(p.eta(i, k));
    for (int k = 0; k < K; ++k) out << ',' << format_double(p.theta(i, k));
    out << '\n';
  }
}

namespace {

const char* kScoreHeader =
    "label,seed,log_score,energy_score,brier1,brier2,auc1,auc2,msep1,msep2,n_test,mc_samples,"
    "config_hash";
constexpr int kScoreMetrics = 8;
const char* kMetricNames[kScoreMetrics] = {"log_score", "energy_score", "brier1", "brier2",
                                           "auc1",      "auc2",         "msep1",  "msep2"};

}  // namespace

void cmd_score(const CommandOptions& opt) {
  require(opt.data, "--data", "score");
  require(opt.model, "--model", "score");
  const RunConfig c = resolve_config(opt);
  ModelMeta meta;
  const FittedModel model = load_model_file(opt.model, &meta);
  const Dataset data = read_csv_file(opt.data);
  const Dataset test = data.count(Partition::test) > 0 ? data.subset(Partition::test) : data;
  check_levels(model, test);
  const ScoreReport r = score_report(model, test, c.score_samples, c.seed, c.boost.threads);
  std::ostringstream row;
  row << meta.label << ',' << c.seed << ',' << cell(r.log_score) << ',' << cell(r.energy_score)
      << ',' << cell(r.brier[0]) << ',' << cell(r.brier[1]) << ',' << cell(r.auc[0]) << ','
      << cell(r.auc[1]) << ',' << cell(r.msep[0]) << ',' << cell(r.msep[1]) << ',' << r.n_test
      << ',' << r.mc_samples << ',' << meta.config_hash;
  if (!opt.out.empty()) open_out(opt.out) << kScoreHeader << '\n' << row.str() << '\n';
  std::cout << "log score    " << cell(r.log_score) << "\nenergy score " << cell(r.energy_score)
            << '\n';
  for (int j = 0; j < 2; ++j) {
    if (!std::isnan(r.brier[j]))
      std::cout << "margin " << j + 1 << ": brier " << cell(r.brier[j]) << ", auc "
                << cell(r.auc[j]) << '\n';
    else
      std::cout << "margin " << j + 1 << ": msep " << cell(r.msep[j]) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  return f;
}

std::string mean_sd(const std::vector<double>& v) {
  if (v.empty()) return "NA";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(3);
  s << stats::mean(v);
  if (v.size() > 1) s << " (" << std::sqrt(stats::variance(v)) << ")";
  return s.str();
}

}  // namespace

void cmd_report(const CommandOptions& opt) {
  require(opt.data, "--data (a replicate directory)", "report");
  require(opt.out, "--out", "report");
  if (!fs::is_directory(opt.data)) throw InputError("'" + opt.data + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(opt.data))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());

  // label -> metric -> values, in file order.
  std::map<std::string, std::vector<std::vector<double>>> scores;
  std::map<std::string, std::vector<FittedModel>> models;
  std::vector<std::set<int>> truth;
  std::vector<std::string> truth_names;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::string header;
    if (!std::getline(in, header)) continue;
    if (header.rfind(kScoreHeader, 0) == 0) {
      for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 13) throw InputError(path.string() + ": malformed score row");
        auto& slot = scores[f[0]];
        slot.resize(kScoreMetrics);
        for (int m = 0; m < kScoreMetrics; ++m) {
          if (f[2 + m] == "NA") continue;
          try {
            slot[m].push_back(std::stod(f[2 + m]));
          } catch (const std::logic_error&) {
            throw InputError(path.string() + ": bad number '" + f[2 + m] + "'");
          }
        }
      }
    } else if (header.rfind("parameter,covariates", 0) == 0) {
      std::vector<std::set<int>> t;
      std::vector<std::string> names;
      for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        names.push_back(f.at(0));
        std::set<int> s;
        std::stringstream ss(f.size() > 1 ? f[1] : "");
        for (std::string tok; ss >> tok;) s.insert(std::stoi(tok.substr(1)) - 1);
        t.push_back(s);
      }
      if (!truth.empty() && t != truth)
        throw InputError("replicates disagree on the informative covariates");
      truth = t;
      truth_names = names;
    } else if (path.extension() == ".json" && header.find('{') != std::string::npos) {
      ModelMeta meta;
      std::ifstream again(path);
      try {
        FittedModel m = load_model(again, &meta);
        models[meta.label].push_back(std::move(m));
      } catch (const InputError&) {
        // Not a model file.
      }
    }
  }
  if (scores.empty() && models.empty())
    throw InputError("no score CSVs or model files found in '" + opt.data + "'");

  std::ofstream out = open_out(opt.out);
  out << "metric,label,mean,sd,n\n";
  for (const auto& [label, metrics] : scores) {
    for (int m = 0; m < kScoreMetrics; ++m) {
      const auto& v = metrics[m];
      if (v.empty()) continue;
      out << kMetricNames[m] << ',' << label << ',' << format_double(stats::mean(v)) << ','
          << (v.size() > 1 ? format_double(std::sqrt(stats::variance(v))) : "NA") << ','
          << v.size() << '\n';
    }
  }
  // Human-readable metric x label table with mean (sd) cells.
  if (!scores.empty()) {
    std::cout << "metric";
    for (const auto& [label, _] : scores) std::cout << '\t' << label;
    std::cout << '\n';
    for (int m = 0; m < kScoreMetrics; ++m) {
      bool any = false;
      for (const auto& [_, metrics] : scores) any = any || !metrics[m].empty();
      if (!any) continue;
      std::cout << kMetricNames[m];
      for (const auto& [_, metrics] : scores) std::cout << '\t' << mean_sd(metrics[m]);
      std::cout << '\n';
    }
  }
  if (!models.empty() && !truth.empty()) {
    std::ofstream sel = open_out(sibling(opt.out, "selection"));
    sel << "label,parameter,informative,noninformative,replicates\n";
    for (const auto& [label, ms] : models) {
      const SelectionRates r = selection_rates(ms, truth);
      for (std::size_t k = 0; k < truth.size(); ++k) {
        sel << label << ',' << ms.front().spec.param_name(static_cast<int>(k)) << ','
            << cell(r.informative[k]) << ',' << cell(r.noninformative[k]) << ',' << ms.size()
            << '\n';
        std::cout << "selection " << label << ' ' << truth_names[k] << ": informative "
                  << cell(r.informative[k]) << "%, non-informative " << cell(r.noninformative[k])
                  << "%\n";
      }
    }
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Bivariate copula regression by component-wise gradient boosting"};
  app.require_subcommand(1);
  CommandOptions opt;
  std::uint64_t seed = 0;
  int threads = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON run configuration");
    sub->add_option("--data", opt.data, "input CSV (or trace CSV / replicate directory)");
    sub->add_option("--model", opt.model, "model file");
    sub->add_option("--out", opt.out, "output path");
    sub->add_option("--seed", seed, "seed overriding the config");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 1024));
  };
  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic data set");
  CLI::App* fit = app.add_subcommand("fit", "fit a model by boosting");
  CLI::App* tune = app.add_subcommand("tune", "print the out-of-bag optimal iteration of a trace");
  CLI::App* pred = app.add_subcommand("predict", "write predictors and parameters per row");
  CLI::App* score = app.add_subcommand("score", "score a model on the test rows");
  CLI::App* report = app.add_subcommand("report", "summarise a directory of replicate results");
  for (CLI::App* s : {sim, fit, tune, pred, score, report}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (CLI::App* s : {sim, fit, tune, pred, score, report}) {
    if (s->count("--seed")) opt.seed = seed;
    if (s->count("--threads")) opt.threads = threads;
  }
  try {
    if (*sim) cmd_simulate(opt);
    else if (*fit) cmd_fit(opt);
    else if (*tune) cmd_tune(opt);
    else if (*pred) cmd_predict(opt);
    else if (*score) cmd_score(opt);
    else if (*report) cmd_report(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace copboost
