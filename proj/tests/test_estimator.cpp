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


#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "isr/estimator.hpp"
#include "isr/geometry.hpp"
#include "isr/oracle.hpp"
#include "isr/rng.hpp"
#include "isr/screening.hpp"
#include "oracles.hpp"

namespace isr {
namespace {

std::vector<InputInstance> uniform_instances(const Topology& topo, std::size_t count, std::uint64_t seed) {
  std::vector<InputInstance> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_uniform_instance(topo, -1.0, 1.0, CounterRng(seed, k)()));
  return out;
}

double max_error(const ResponseModel& a, const ResponseModel& b) {
  double e = 0.0;
  for (const auto& [term, p] : a.terms()) {
    e = std::max(e, (to_feature_coefficients(p) - to_feature_coefficients(b.at(term))).lpNorm<Eigen::Infinity>());
  }
  return e;
}

// Small planted problem shared by several tests: chain of three qubits.
struct ChainProblem {
  Topology topo = Topology::chain(3);
  ResponseModel planted = random_planted_model(topo, MaskPreset::kPhysical, PlantedScales{}, 5);
  std::vector<InputInstance> instances = uniform_instances(topo, 30, 2);
  Dataset data = generate_synthetic_dataset(planted, instances, ExactMode{}, 0);
};

const ChainProblem& chain() {
  static const ChainProblem p;
  return p;
}

TEST(Screening, LossAtZeroIsExactlyOne) {
  const auto& p = chain();
  const Dataset shots = generate_synthetic_dataset(p.planted, p.instances, ShotMode{37}, 1);
  for (std::size_t q = 0; q < 3; ++q) {
    const LocalResponse zero = LocalResponse::zeros(q, p.topo, MaskPreset::kFull, p.topo.all_output_terms());
    EXPECT_EQ(is_loss(q, p.data, zero), 1.0);
    EXPECT_EQ(is_loss(q, shots, zero, InstanceWeighting::kShots), 1.0);
  }
}

TEST(Screening, SingleQubitCosh) {
  const Topology topo = Topology::empty(1);
  Dataset data(topo);
  Eigen::MatrixXi rows(2, 1);
  rows << 1, -1;
  data.add(InputInstance(topo, Eigen::VectorXd::Constant(1, 0.0)), SampleSet(1, rows, Eigen::Vector2d(0.5, 0.5)));
  LocalResponse lambda = LocalResponse::zeros(0, topo, MaskPreset::kFull, topo.all_output_terms());
  EXPECT_EQ(is_loss_grad(0, data, lambda).lpNorm<Eigen::Infinity>(), 0.0);
  lambda.params[0].c = 0.4;
  EXPECT_NEAR(is_loss(0, data, lambda), std::cosh(0.4), 1e-15);
}

TEST(Screening, MatchesBruteForcePopulationLoss) {
  const auto& p = chain();
  const ResponseModel other = random_planted_model(p.topo, MaskPreset::kPhysical, PlantedScales{0.1, 0.2, 0.2, 0.5}, 8);
  for (std::size_t q = 0; q < 3; ++q) {
    EXPECT_NEAR(is_loss(q, p.data, LocalResponse::from_model(other, q)),
                testing::brute_population_loss(q, p.planted, other, p.instances), 1e-12);
  }
}

TEST(Screening, GradientMatchesFiniteDifferences) {
  const auto& p = chain();
  const ScreeningObjective f(p.data, LocalResponse::from_model(p.planted, 1));
  CounterRng rng(4);
  Eigen::VectorXd x(static_cast<Eigen::Index>(f.num_free()));
  for (auto& v : x) v = 0.3 * (2.0 * rng.uniform() - 1.0);
  Eigen::VectorXd g;
  f.value_and_gradient(x, g);
  const Eigen::VectorXd fd = testing::central_difference([&](const Eigen::VectorXd& y) { return f.value(y); }, x, 1e-6);
  EXPECT_LT((g - fd).norm() / g.norm(), 1e-6);
}

TEST(Screening, VanishingGradientAtPlantedPoint) {
  const auto& p = chain();
  for (std::size_t q = 0; q < 3; ++q) {
    EXPECT_LT(is_loss_grad(q, p.data, LocalResponse::from_model(p.planted, q)).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Screening, ConvexAlongSegments) {
  const auto& p = chain();
  const ScreeningObjective f(p.data, LocalResponse::from_model(p.planted, 0));
  CounterRng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(f.num_free())), y(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      x(k) = 0.5 * (2.0 * rng.uniform() - 1.0);
      y(k) = 0.5 * (2.0 * rng.uniform() - 1.0);
    }
    const double t = rng.uniform();
    EXPECT_LE(f.value(t * x + (1 - t) * y), t * f.value(x) + (1 - t) * f.value(y) + 1e-12);
  }
}

TEST(Screening, MaskedParametersDoNotMoveLoss) {
  const auto& p = chain();
  LocalResponse lambda = LocalResponse::from_model(p.planted, 0);
  const double before = is_loss(0, p.data, lambda);
  for (auto& params : lambda.params) {
    for (Eigen::Index a = 0; a < params.chi.rows(); ++a) {
      for (Eigen::Index b = 0; b < params.chi.cols(); ++b) {
        if (!params.chi_free(a, b)) params.chi(a, b) = 3.0;
      }
    }
  }
  EXPECT_EQ(lambda.free_parameters(), LocalResponse::from_model(p.planted, 0).free_parameters());
  LocalResponse rebuilt = LocalResponse::from_model(p.planted, 0);
  rebuilt.set_free_parameters(lambda.free_parameters());
  EXPECT_EQ(is_loss(0, p.data, rebuilt), before);
}

TEST(Fit, RecoversPlantedChain) {
  const auto& p = chain();
  FitConfig config;
  config.tolerance = 1e-8;
  const auto [model, report] = fit_response(p.data, config);
  EXPECT_TRUE(report.converged());
  EXPECT_LT(max_error(model, p.planted), 1e-5);
  EXPECT_LT(report.reconciliation_discrepancy, 1e-4);
  for (const auto& q : report.qubits) {
    EXPECT_LE(q.final_loss, q.initial_loss);
    EXPECT_EQ(q.rank, q.required);
    EXPECT_LE(q.grad_inf_norm, config.tolerance);
  }
}

TEST(Fit, EntropicDescentRecovers) {
  const auto& p = chain();
  FitConfig config;
  config.optimizer = Optimizer::kEntropicDescent;
  config.tolerance = 1e-7;
  config.max_iterations = 20000;
  const auto [model, report] = fit_response(p.data, config);
  EXPECT_LT(max_error(model, p.planted), 1e-3);
}

TEST(Fit, ZeroModelDataGivesZero) {
  const Topology topo = Topology::chain(3);
  const Dataset data = generate_synthetic_dataset(ResponseModel::zeros(topo, MaskPreset::kPhysical),
                                                  uniform_instances(topo, 20, 3), ExactMode{}, 0);
  const auto [model, report] = fit_response(data, FitConfig{});
  EXPECT_LT(max_error(model, ResponseModel::zeros(topo, MaskPreset::kPhysical)), 1e-6);
}

TEST(Fit, LargeL1DrivesEverythingToZero) {
  const auto& p = chain();
  FitConfig config;
  config.l1 = 10.0;
  const auto [model, report] = fit_response(p.data, config);
  for (const auto& [term, params] : model.terms()) EXPECT_TRUE(to_feature_coefficients(params).isZero()) << term.label();
}

TEST(Fit, IdentityDeviceRecoversInverseTemperature) {
  const Topology topo = Topology::complete(3);
  const double beta = 0.8;
  const ResponseModel planted = ResponseModel::identity(topo, MaskPreset::kPhysical, beta);
  const Dataset data = generate_synthetic_dataset(planted, uniform_instances(topo, 40, 12), ExactMode{}, 0);
  FitConfig config;
  config.tolerance = 1e-9;
  const auto [model, report] = fit_response(data, config);
  const auto index = canonical_index(topo);
  for (const auto& [term, params] : model.terms()) {
    EXPECT_NEAR(params.beta(static_cast<Eigen::Index>(index.at(term))), beta, 1e-6);
    Eigen::VectorXd rest = to_feature_coefficients(params);
    rest(1 + static_cast<Eigen::Index>(index.at(term))) = 0.0;
    EXPECT_LT(rest.lpNorm<Eigen::Infinity>(), 1e-6);
  }
}

TEST(Fit, SingleQubitModelHasOnlyFieldTerm) {
  const Topology topo = Topology::empty(1);
  const ResponseModel planted = ResponseModel::identity(topo, MaskPreset::kFull, 1.5);
  const Dataset data = generate_synthetic_dataset(planted, uniform_instances(topo, 5, 1), ExactMode{}, 0);
  const auto [model, report] = fit_response(data, FitConfig{});
  ASSERT_EQ(model.term_ids().size(), 1u);
  EXPECT_EQ(model.term_ids()[0], TermId::Single(0));
  EXPECT_NEAR(model.at(TermId::Single(0)).beta(0), 1.5, 1e-5);
}

TEST(Fit, ThreadCountDoesNotChangeResult) {
  const auto& p = chain();
  FitConfig one;
  one.threads = 1;
  FitConfig many;
  many.threads = 3;
  EXPECT_EQ(fit_response(p.data, one).first, fit_response(p.data, many).first);
}

TEST(Fit, RejectsBadConfig) {
  FitConfig config;
  config.tolerance = 0.0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = FitConfig{};
  config.l1 = -1.0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  EXPECT_THROW(parse_optimizer("adam"), std::invalid_argument);
  EXPECT_EQ(parse_online_step(to_string(OnlineStep::kNewton)), OnlineStep::kNewton);
  EXPECT_EQ(parse_step_schedule(to_string(StepSchedule::kPerUpdate)), StepSchedule::kPerUpdate);
}

TEST(Fit, BudgetExhaustionIsReported) {
  const auto& p = chain();
  FitConfig config;
  config.max_iterations = 2;
  const auto [model, report] = fit_response(p.data, config);
  EXPECT_FALSE(report.converged());
  EXPECT_FALSE(report.warnings.empty());
}

TEST(Rise, RecoversKnownHamiltonian) {
  OutputHamiltonian truth(4);
  CounterRng rng(21);
  for (const auto& term : Topology::complete(4).all_output_terms()) truth.set(term, 0.3 * (2.0 * rng.uniform() - 1.0));
  FitConfig config;
  config.tolerance = 1e-10;
  const OutputHamiltonian learned =
      rise_fit(as_exact_sampleset(enumerate_distribution(truth)), Topology::complete(4).all_output_terms(), config);
  for (const auto& [term, v] : truth.terms) EXPECT_NEAR(learned.value(term), v, 1e-6);
}

TEST(Rise, UniformSpinsGiveZero) {
  const OutputHamiltonian learned = rise_fit(as_exact_sampleset(enumerate_distribution(OutputHamiltonian(3))),
                                             Topology::complete(3).all_output_terms(), FitConfig{});
  EXPECT_LT(learned.max_abs(), 1e-12);
}

TEST(Rise, DetectsSpuriousPair) {
  const Topology topo = Topology::chain(3);
  ResponseModel planted = ResponseModel::identity(topo, MaskPreset::kPhysical);
  ResponseTermParams p = planted.at(TermId::Pair(0, 2));
  p.c = 0.2;
  planted.set(TermId::Pair(0, 2), p);
  const Dataset data = generate_synthetic_dataset(planted, uniform_instances(topo, 1, 9), ExactMode{}, 0);
  const OutputHamiltonian learned = rise_fit(data.samples(0), topo.all_output_terms(), FitConfig{});
  EXPECT_NEAR(learned.value(TermId::Pair(0, 2)), 0.2, 1e-5);
}

TEST(Online, StepZeroAndZeroGradientAreIdentity) {
  const auto& p = chain();
  const LocalResponse start = LocalResponse::from_model(p.planted, 0);
  const LocalResponse same = online_update(start, p.data.instance(0), p.data.samples(0), 0.0);
  EXPECT_EQ(same.free_parameters(), start.free_parameters());

  // The uniform distribution has zero gradient at zero parameters.
  const Topology topo = Topology::empty(2);
  const InputInstance inst(topo, Eigen::Vector2d(0.3, -0.1));
  const SampleSet uniform = as_exact_sampleset(enumerate_distribution(OutputHamiltonian(2)));
  const LocalResponse zero = LocalResponse::zeros(0, topo, MaskPreset::kFull, topo.all_output_terms());
  for (auto kind : {OnlineStep::kGradient, OnlineStep::kNewton}) {
    EXPECT_TRUE(online_update(zero, inst, uniform, 0.5, nullptr, 0.0, kind).free_parameters().isZero());
  }
  EXPECT_THROW(online_update(zero, inst, uniform, -1.0), std::invalid_argument);
}

TEST(Online, DimensionMismatchThrows) {
  const auto& p = chain();
  const LocalResponse lambda = LocalResponse::zeros(0, Topology::complete(3), MaskPreset::kFull,
                                                    Topology::complete(3).all_output_terms());
  EXPECT_THROW(online_update(lambda, p.data.instance(0), p.data.samples(0), 0.1), std::invalid_argument);
}

TEST(Online, OnePassDecreasesRunningLoss) {
  const auto& p = chain();
  for (std::size_t q = 0; q < 3; ++q) {
    LocalResponse lambda = LocalResponse::zeros(q, p.topo, MaskPreset::kPhysical, p.topo.all_output_terms());
    const double before = is_loss(q, p.data, lambda);
    for (std::size_t k = 0; k < p.data.size(); ++k) {
      lambda = online_update(lambda, p.data.instance(k), p.data.samples(k), 0.1 / std::sqrt(k + 1.0));
    }
    EXPECT_LT(is_loss(q, p.data, lambda), before);
  }
}

TEST(Online, OptimizerApproachesBatchMinimizer) {
  const auto& p = chain();
  FitConfig batch;
  batch.tolerance = 1e-10;
  FitConfig online;
  online.optimizer = Optimizer::kOnlineSgd;
  EXPECT_LT(max_error(fit_response(p.data, online).first, fit_response(p.data, batch).first), 1e-3);
}

TEST(Online, StreamingLearnerDecreasesLoss) {
  const auto& p = chain();
  OnlineLearner learner(p.topo, FitConfig{});
  for (int epoch = 0; epoch < 5; ++epoch) {
    for (std::size_t k = 0; k < p.data.size(); ++k) learner.observe(p.data.instance(k), p.data.samples(k));
  }
  EXPECT_EQ(learner.steps(), 5 * p.data.size());
  const ResponseModel model = learner.model();
  for (std::size_t q = 0; q < 3; ++q) EXPECT_LT(is_loss(q, p.data, LocalResponse::from_model(model, q)), 1.0);
}

TEST(Identifiability, Counts) {
  const Topology topo = Topology::complete(4);
  const auto inst = uniform_instances(topo, 66, 40);
  const auto full = identifiability_check(inst, MaskPreset::kFull);
  EXPECT_EQ(full.required, 66u);
  EXPECT_EQ(full.rank, 66u);
  EXPECT_TRUE(full.sufficient);
  const std::vector<InputInstance> fewer(inst.begin(), inst.begin() + 65);
  const auto short_report = identifiability_check(fewer, MaskPreset::kFull);
  EXPECT_LE(short_report.rank, 65u);
  EXPECT_FALSE(short_report.sufficient);
  const std::vector<InputInstance> eleven(inst.begin(), inst.begin() + 11);
  const auto linear = identifiability_check(eleven, MaskPreset::kLinear);
  EXPECT_EQ(linear.required, 11u);
  EXPECT_TRUE(linear.sufficient);
}

TEST(Identifiability, DuplicatesDoNotAddRank) {
  const Topology topo = Topology::complete(3);
  auto inst = uniform_instances(topo, 10, 41);
  const auto before = identifiability_check(inst, MaskPreset::kFull).rank;
  const auto copy = inst;
  inst.insert(inst.end(), copy.begin(), copy.end());
  EXPECT_EQ(identifiability_check(inst, MaskPreset::kFull).rank, before);
  EXPECT_THROW(identifiability_check({}, MaskPreset::kFull), std::invalid_argument);
}

}  // namespace
}  // namespace isr
