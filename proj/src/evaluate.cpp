// Copyright 2026 The Ising Response Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "isr/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include "isr/io.hpp"
#include "isr/oracle.hpp"
#include "isr/rng.hpp"

namespace isr {

KindStats kind_stats(const std::vector<double>& predicted, const std::vector<double>& reconstructed) {
  if (predicted.size() != reconstructed.size()) throw std::invalid_argument("kind_stats: length mismatch");
  KindStats stats;
  stats.count = predicted.size();
  if (stats.count == 0) {
    stats.pearson = std::numeric_limits<double>::quiet_NaN();
    return stats;
  }
  const auto x = Eigen::Map<const Eigen::ArrayXd>(predicted.data(), static_cast<Eigen::Index>(stats.count));
  const auto y = Eigen::Map<const Eigen::ArrayXd>(reconstructed.data(), static_cast<Eigen::Index>(stats.count));
  stats.rmse = std::sqrt((x - y).square().mean());
  const Eigen::ArrayXd dx = x - x.mean();
  const Eigen::ArrayXd dy = y - y.mean();
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  stats.pearson = (sxx > 0.0 && syy > 0.0) ? (dx * dy).sum() / std::sqrt(sxx * syy)
                                           : std::numeric_limits<double>::quiet_NaN();
  return stats;
}

EvaluationReport evaluate_model(const ResponseModel& model, const Dataset& test, const EvaluateOptions& options) {
  if (test.empty()) throw std::invalid_argument("evaluate_model: empty test dataset");
  if (!(test.topology() == model.topology())) {
    throw std::invalid_argument("evaluate_model: test topology does not match the model");
  }
  options.rise_config.validate();
  const auto terms = model.term_ids();
  const std::set<std::uint64_t> training(options.training_hashes.begin(), options.training_hashes.end());

  EvaluationReport report;
  report.bootstrap_replicas = options.bootstrap;
  report.bootstrap_shots = options.bootstrap > 0 ? options.bootstrap_shots : 0;
  std::vector<double> pred[2];
  std::vector<double> reco[2];
  for (std::size_t k = 0; k < test.size(); ++k) {
    InstanceEvaluation eval;
    eval.hash = instance_hash(test.instance(k));
    eval.seen_in_training = training.count(eval.hash) != 0;
    if (eval.seen_in_training) {
      report.warnings.push_back("test instance " + std::to_string(k) + " (" + hash_hex(eval.hash) +
                                ") also appears in the training set");
    }
    const OutputHamiltonian predicted = predict_output(test.instance(k), model);
    const auto [rise, rise_report] = rise_fit_with_report(test.samples(k), terms, options.rise_config);
    if (!rise_report.converged()) {
      report.warnings.push_back("test instance " + std::to_string(k) + ": reconstruction did not converge");
    }

    std::vector<std::vector<double>> replicas(terms.size());
    if (options.bootstrap > 0) {
      const ProbabilityTable table = enumerate_distribution(rise);
      CounterRng rng(options.seed, k);
      for (std::size_t b = 0; b < options.bootstrap; ++b) {
        const SampleSet shots = exact_sample(table, options.bootstrap_shots, rng());
        const OutputHamiltonian refit = rise_fit(shots, terms, options.rise_config);
        for (std::size_t t = 0; t < terms.size(); ++t) replicas[t].push_back(refit.value(terms[t]));
      }
    }

    for (std::size_t t = 0; t < terms.size(); ++t) {
      EvaluationPoint point;
      point.term = terms[t];
      point.predicted = predicted.value(terms[t]);
      point.reconstructed = rise.value(terms[t]);
      if (replicas[t].size() >= 2) {
        const auto v = Eigen::Map<const Eigen::ArrayXd>(replicas[t].data(),
                                                        static_cast<Eigen::Index>(replicas[t].size()));
        point.bootstrap_std = std::sqrt((v - v.mean()).square().sum() / static_cast<double>(v.size() - 1));
      } else {
        point.bootstrap_std = std::numeric_limits<double>::quiet_NaN();
      }
      const int kind = terms[t].is_pair() ? 0 : 1;
      pred[kind].push_back(point.predicted);
      reco[kind].push_back(point.reconstructed);
      eval.points.push_back(point);
    }
    report.instances.push_back(std::move(eval));
  }
  report.pairs = kind_stats(pred[0], reco[0]);
  report.singles = kind_stats(pred[1], reco[1]);
  std::vector<double> all_pred = pred[0];
  std::vector<double> all_reco = reco[0];
  all_pred.insert(all_pred.end(), pred[1].begin(), pred[1].end());
  all_reco.insert(all_reco.end(), reco[1].begin(), reco[1].end());
  report.all = kind_stats(all_pred, all_reco);
  return report;
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json stats_json(const KindStats& s) {
  return {{"count", s.count}, {"rmse", s.rmse}, {"pearson", finite_or_null(s.pearson)}};
}

}  // namespace

nlohmann::json evaluation_to_json(const EvaluationReport& report) {
  nlohmann::json doc{{"format", "isr.evaluation"}, {"version", kFormatVersion}};
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& inst : report.instances) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : inst.points) {
      points.push_back({{"term", p.term.label()},
                        {"predicted", p.predicted},
                        {"reconstructed", p.reconstructed},
                        {"bootstrap_std", finite_or_null(p.bootstrap_std)}});
    }
    instances.push_back({{"hash", hash_hex(inst.hash)}, {"seen_in_training", inst.seen_in_training}, {"points", points}});
  }
  doc["instances"] = instances;
  doc["summary"] = {{"pairs", stats_json(report.pairs)},
                    {"singles", stats_json(report.singles)},
                    {"all", stats_json(report.all)}};
  doc["bootstrap"] = {{"replicas", report.bootstrap_replicas}, {"shots", report.bootstrap_shots}};
  doc["warnings"] = report.warnings;
  return doc;
}

std::string evaluation_table(const EvaluationReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %-10s %14s %14s %14s %12s\n", "instance", "term", "predicted",
                "reconstructed", "difference", "boot_std");
  out += line;
  for (std::size_t k = 0; k < report.instances.size(); ++k) {
    for (const auto& p : report.instances[k].points) {
      std::snprintf(line, sizeof(line), "%-8zu %-10s %14.6e %14.6e %14.6e %12.4e\n", k, p.term.label().c_str(),
                    p.predicted, p.reconstructed, p.predicted - p.reconstructed, p.bootstrap_std);
      out += line;
    }
  }
  out += "\n";
  std::snprintf(line, sizeof(line), "%-8s %8s %14s %10s\n", "kind", "count", "rmse", "pearson");
  out += line;
  const std::pair<const char*, const KindStats*> rows[] = {
      {"pairs", &report.pairs}, {"singles", &report.singles}, {"all", &report.all}};
  for (const auto& [name, s] : rows) {
    std::snprintf(line, sizeof(line), "%-8s %8zu %14.6e %10.6f\n", name, s->count, s->rmse, s->pearson);
    out += line;
  }
  for (const auto& w : report.warnings) out += "warning: " + w + "\n";
  return out;
}

}  // namespace isr
