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


#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "isr/evaluate.hpp"
#include "isr/geometry.hpp"
#include "isr/io.hpp"
#include "isr/oracle.hpp"
#include "isr/rng.hpp"

namespace isr {
namespace {

std::vector<InputInstance> instances(const Topology& topo, std::size_t count, std::uint64_t seed) {
  std::vector<InputInstance> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_uniform_instance(topo, -1.0, 1.0, CounterRng(seed, k)()));
  return out;
}

TEST(Evaluate, IdentityDeviceLiesOnDiagonal) {
  const Topology topo = Topology::complete(4);
  const ResponseModel device = ResponseModel::identity(topo, MaskPreset::kPhysical);
  const Dataset test = generate_synthetic_dataset(device, instances(topo, 5, 3), ExactMode{}, 0);
  EvaluateOptions options;
  options.rise_config.tolerance = 1e-10;
  const EvaluationReport report = evaluate_model(device, test, options);
  ASSERT_EQ(report.instances.size(), 5u);
  for (const auto& inst : report.instances) {
    EXPECT_EQ(inst.points.size(), 10u);
    for (const auto& p : inst.points) EXPECT_NEAR(p.predicted, p.reconstructed, 1e-4) << p.term.label();
  }
  EXPECT_GT(report.all.pearson, 0.9999);
  EXPECT_EQ(report.all.count, 50u);
  EXPECT_EQ(report.pairs.count, 30u);
  EXPECT_EQ(report.singles.count, 20u);
  EXPECT_LT(report.all.rmse, 1e-4);
}

TEST(Evaluate, ZeroDeviceGivesZeroEverywhere) {
  const Topology topo = Topology::chain(3);
  const ResponseModel device = ResponseModel::zeros(topo, MaskPreset::kPhysical);
  const Dataset test = generate_synthetic_dataset(device, instances(topo, 3, 4), ExactMode{}, 0);
  const EvaluationReport report = evaluate_model(device, test, EvaluateOptions{});
  for (const auto& inst : report.instances) {
    for (const auto& p : inst.points) {
      EXPECT_EQ(p.predicted, 0.0);
      EXPECT_LT(std::abs(p.reconstructed), 1e-8);
    }
  }
  EXPECT_LT(report.all.rmse, 1e-8);
  EXPECT_TRUE(std::isnan(report.all.pearson));
  EXPECT_TRUE(evaluation_to_json(report)["summary"]["all"]["pearson"].is_null());
}

TEST(Evaluate, WarnsOnTrainingOverlap) {
  const Topology topo = Topology::chain(2);
  const auto inst = instances(topo, 2, 5);
  const ResponseModel device = ResponseModel::identity(topo, MaskPreset::kFull);
  const Dataset test = generate_synthetic_dataset(device, inst, ExactMode{}, 0);
  EvaluateOptions options;
  options.training_hashes = {instance_hash(inst[1])};
  const EvaluationReport report = evaluate_model(device, test, options);
  EXPECT_FALSE(report.instances[0].seen_in_training);
  EXPECT_TRUE(report.instances[1].seen_in_training);
  EXPECT_EQ(report.warnings.size(), 1u);
}

TEST(Evaluate, DimensionMismatchThrows) {
  const ResponseModel model = ResponseModel::zeros(Topology::complete(3), MaskPreset::kFull);
  const Topology chain = Topology::chain(3);
  const Dataset test =
      generate_synthetic_dataset(ResponseModel::zeros(chain, MaskPreset::kFull), instances(chain, 1, 1), ExactMode{}, 0);
  EXPECT_THROW(evaluate_model(model, test, EvaluateOptions{}), std::invalid_argument);
}

TEST(Evaluate, KindStatsAgainstHandComputation) {
  const KindStats s = kind_stats({1.0, 2.0, 3.0}, {1.5, 2.0, 2.5});
  EXPECT_EQ(s.count, 3u);
  EXPECT_NEAR(s.rmse, std::sqrt(0.5 / 3.0), 1e-15);
  EXPECT_NEAR(s.pearson, 1.0, 1e-15);
  EXPECT_NE(evaluation_table(EvaluationReport{}).find("rmse"), std::string::npos);
}

TEST(Evaluate, BootstrapSpreadScalesAsInverseRootShots) {
  const Topology topo = Topology::chain(3);
  const ResponseModel device = ResponseModel::identity(topo, MaskPreset::kPhysical);
  const Dataset test = generate_synthetic_dataset(device, instances(topo, 1, 6), ExactMode{}, 0);
  std::vector<double> spread;
  for (std::size_t m : {1000, 10000, 100000}) {
    EvaluateOptions options;
    options.bootstrap = 30;
    options.bootstrap_shots = m;
    options.seed = 2;
    const EvaluationReport report = evaluate_model(device, test, options);
    EXPECT_EQ(report.bootstrap_replicas, 30u);
    double mean = 0.0;
    for (const auto& p : report.instances[0].points) mean += p.bootstrap_std;
    spread.push_back(mean / static_cast<double>(report.instances[0].points.size()));
  }
  for (std::size_t k = 0; k + 1 < spread.size(); ++k) {
    const double ratio = spread[k] / spread[k + 1];
    EXPECT_GT(ratio, std::sqrt(10.0) / 1.5) << k;
    EXPECT_LT(ratio, std::sqrt(10.0) * 1.5) << k;
  }
}

}  // namespace
}  // namespace isr
