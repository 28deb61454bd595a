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

// Predicted-versus-reconstructed comparison on held-out instances.

#ifndef ISR_EVALUATE_HPP_
#define ISR_EVALUATE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isr/dataset.hpp"
#include "isr/estimator.hpp"
#include "isr/response.hpp"

namespace isr {

struct EvaluationPoint {
  TermId term;
  double predicted = 0.0;
  double reconstructed = 0.0;
  /// Standard deviation over bootstrap replicas; NaN without bootstrap.
  double bootstrap_std = 0.0;
};

struct InstanceEvaluation {
  std::uint64_t hash = 0;
  bool seen_in_training = false;
  std::vector<EvaluationPoint> points;
};

/// Pearson is NaN when either side has zero variance.
struct KindStats {
  std::size_t count = 0;
  double rmse = 0.0;
  double pearson = 0.0;
};

struct EvaluationReport {
  std::vector<InstanceEvaluation> instances;
  KindStats pairs;
  KindStats singles;
  KindStats all;
  std::size_t bootstrap_replicas = 0;
  std::size_t bootstrap_shots = 0;
  std::vector<std::string> warnings;
};

struct EvaluateOptions {
  FitConfig rise_config;
  /// Replicas per instance; 0 disables the bootstrap.
  std::size_t bootstrap = 0;
  std::size_t bootstrap_shots = 10000;
  std::uint64_t seed = 0;
  /// Hashes of the training instances, for overlap warnings.
  std::vector<std::uint64_t> training_hashes;
};

KindStats kind_stats(const std::vector<double>& predicted, const std::vector<double>& reconstructed);

/// Reconstructs each test instance on its own and pairs the result with the
/// model's prediction for every modeled term. Throws std::invalid_argument on
/// a topology mismatch or an empty dataset.
EvaluationReport evaluate_model(const ResponseModel& model, const Dataset& test, const EvaluateOptions& options);

nlohmann::json evaluation_to_json(const EvaluationReport& report);
/// Aligned text table, one row per (instance, term), then the aggregates.
std::string evaluation_table(const EvaluationReport& report);

}  // namespace isr

#endif  // ISR_EVALUATE_HPP_
