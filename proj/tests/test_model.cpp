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

#include "isr/features.hpp"
#include "isr/hamiltonian.hpp"
#include "isr/oracle.hpp"
#include "isr/response.hpp"
#include "isr/rng.hpp"
#include "isr/spins.hpp"
#include "isr/topology.hpp"
#include "oracles.hpp"

namespace isr {
namespace {

TEST(Topology, TwoQubitCanonicalOrder) {
  const Topology topo(2, {{0, 1}});
  EXPECT_EQ(topo.dimension(), 3u);
  const auto index = canonical_index(topo);
  EXPECT_EQ(index.at(TermId::Pair(0, 1)), 0u);
  EXPECT_EQ(index.at(TermId::Single(0)), 1u);
  EXPECT_EQ(index.at(TermId::Single(1)), 2u);
}

TEST(Topology, Dimensions) {
  EXPECT_EQ(Topology::complete(4).dimension(), 10u);
  EXPECT_EQ(Topology::empty(1).dimension(), 1u);
  EXPECT_EQ(Topology::chain(5).dimension(), 9u);
}

TEST(Topology, EdgesSortedLexicographically) {
  const Topology topo(3, {{2, 1}, {0, 2}});
  ASSERT_EQ(topo.num_edges(), 2u);
  EXPECT_EQ(topo.edges()[0], Edge(0, 2));
  EXPECT_EQ(topo.edges()[1], Edge(1, 2));
  EXPECT_TRUE(topo.has_edge(2, 0));
  EXPECT_FALSE(topo.has_edge(0, 1));
}

TEST(Topology, RejectsInvalidEdges) {
  EXPECT_THROW(Topology(2, {{0, 0}}), std::invalid_argument);
  EXPECT_THROW(Topology(2, {{0, 2}}), std::invalid_argument);
  EXPECT_THROW(Topology(3, {{0, 1}, {1, 0}}), std::invalid_argument);
}

TEST(Topology, TermLabelsRoundTrip) {
  for (const auto& term : Topology::complete(4).all_output_terms()) {
    EXPECT_EQ(TermId::parse(term.label()), term);
  }
  EXPECT_THROW(TermId::parse("K_01"), std::invalid_argument);
}

TEST(Topology, InstanceDimensionChecked) {
  EXPECT_THROW(InputInstance(Topology::complete(3), Eigen::VectorXd::Zero(5)), std::invalid_argument);
}

TEST(Features, CountAndSlots) {
  EXPECT_EQ(feature_count(10), 66u);
  EXPECT_EQ(feature_count(0), 1u);
  const std::size_t dim = 4;
  std::size_t expected = 1 + dim;
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      EXPECT_EQ(quadratic_slot(dim, a, b), expected);
      EXPECT_EQ(quadratic_slot(dim, b, a), expected);
      ++expected;
    }
  }
}

TEST(Features, InnerProductMatchesPolynomial) {
  CounterRng rng(3);
  const Topology topo = Topology::complete(3);
  const ResponseModel model = random_planted_model(topo, MaskPreset::kFull, PlantedScales{0.3, 0.5, 0.7, 1.0}, 9);
  Eigen::VectorXd theta(6);
  for (auto& v : theta) v = 2.0 * rng.uniform() - 1.0;
  for (const auto& [term, p] : model.terms()) {
    EXPECT_NEAR(quadratic_features(theta).dot(to_feature_coefficients(p)), testing::poly_eval(theta, p), 1e-13);
  }
}

TEST(Response, SpecExamples) {
  ResponseTermParams constant = ResponseTermParams::zeros(4, true, true);
  constant.c = 0.3;
  EXPECT_DOUBLE_EQ(response_eval(Eigen::Vector4d(0.1, -0.2, 0.7, 3.0), constant), 0.3);

  ResponseTermParams pick = ResponseTermParams::zeros(4, true, true);
  pick.beta(2) = 1.0;
  EXPECT_DOUBLE_EQ(response_eval(Eigen::Vector4d(0.0, 0.0, 0.05, 0.0), pick), 0.05);

  ResponseTermParams p = ResponseTermParams::zeros(3, true, true);
  p.c = 1.0;
  p.beta = Eigen::Vector3d::Ones();
  p.chi = Eigen::Matrix3d::Identity();
  EXPECT_DOUBLE_EQ(response_eval(Eigen::Vector3d(1, 2, 3), p), 21.0);
  EXPECT_THROW(response_eval(Eigen::Vector2d(1, 2), p), std::invalid_argument);
}

TEST(Response, TemplatedOnScalar) {
  BasicResponseTermParams<float> p = BasicResponseTermParams<float>::zeros(2, true, true);
  p.c = 0.5f;
  p.beta << 1.0f, 2.0f;
  EXPECT_FLOAT_EQ(response_eval(Eigen::Vector2f(1.0f, 1.0f), p), 3.5f);
}

TEST(Response, FeatureCoefficientRoundTrip) {
  const Topology topo = Topology::chain(3);
  const ResponseModel model = random_planted_model(topo, MaskPreset::kPhysical, PlantedScales{}, 4);
  for (const auto& [term, p] : model.terms()) {
    const auto mask = feature_mask(p);
    EXPECT_EQ(from_feature_coefficients(to_feature_coefficients(p), mask, p.dimension()), p);
  }
}

TEST(Response, PhysicalMaskPinsNonEdgeQuadratics) {
  const Topology topo = Topology::chain(3);
  const ResponseTermParams edge = masked_zeros(TermId::Pair(0, 1), topo, MaskPreset::kPhysical);
  const ResponseTermParams far = masked_zeros(TermId::Pair(0, 2), topo, MaskPreset::kPhysical);
  const ResponseTermParams single = masked_zeros(TermId::Single(1), topo, MaskPreset::kPhysical);
  EXPECT_EQ(edge.num_free(), feature_count(topo.dimension()));
  EXPECT_EQ(single.num_free(), feature_count(topo.dimension()));
  EXPECT_EQ(far.num_free(), 1 + topo.dimension());
  EXPECT_EQ(masked_zeros(TermId::Single(0), topo, MaskPreset::kLinear).num_free(), 1 + topo.dimension());
  EXPECT_EQ(masked_zeros(TermId::Single(0), topo, MaskPreset::kConstant).num_free(), 1u);
}

TEST(Response, MaskedEntriesAreInvariant) {
  const Topology topo = Topology::chain(3);
  ResponseModel model = ResponseModel::zeros(topo, MaskPreset::kLinear);
  ResponseTermParams p = model.at(TermId::Single(0));
  p.chi.setConstant(5.0);
  p.beta(1) = 0.25;
  model.set(TermId::Single(0), p);
  EXPECT_TRUE(model.at(TermId::Single(0)).chi.isZero());
  EXPECT_EQ(model.at(TermId::Single(0)).beta(1), 0.25);
}

TEST(Response, PredictOutputZeroAndIdentity) {
  const Topology topo = Topology::complete(3);
  const InputInstance inst(topo, (Eigen::VectorXd(6) << 0.01, -0.02, 0.03, 0.04, -0.05, 0.0).finished());
  const OutputHamiltonian zero = predict_output(inst, ResponseModel::zeros(topo, MaskPreset::kFull));
  EXPECT_EQ(zero.max_abs(), 0.0);
  const OutputHamiltonian id = predict_output(inst, ResponseModel::identity(topo, MaskPreset::kFull, 2.0));
  const OutputHamiltonian in = from_input(inst);
  for (const auto& [term, v] : in.terms) EXPECT_DOUBLE_EQ(id.value(term), 2.0 * v);
}

TEST(Response, PredictOutputMatchesScalarOracle) {
  const Topology topo = Topology::complete(4);
  const ResponseModel model = random_planted_model(topo, MaskPreset::kPhysical, PlantedScales{0.2, 0.3, 0.4, 1.0}, 17);
  CounterRng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd theta(10);
    for (auto& v : theta) v = 2.0 * rng.uniform() - 1.0;
    const InputInstance inst(topo, theta);
    const OutputHamiltonian out = predict_output(inst, model);
    const auto expected = testing::brute_outputs(theta, model);
    for (const auto& [term, v] : expected) EXPECT_NEAR(out.value(term), v, 1e-13) << term.label();
  }
}

TEST(Response, PredictOutputTopologyMismatch) {
  const ResponseModel model = ResponseModel::zeros(Topology::complete(3), MaskPreset::kFull);
  EXPECT_THROW(predict_output(InputInstance(Topology::chain(3), Eigen::VectorXd::Zero(5)), model),
               std::invalid_argument);
}

TEST(Hamiltonian, OutputEnergyExamples) {
  OutputHamiltonian ham(2);
  EXPECT_EQ(output_energy(Eigen::Vector2i(1, -1), ham), 0.0);
  ham.set(TermId::Pair(0, 1), 0.1);
  EXPECT_DOUBLE_EQ(output_energy(Eigen::Vector2i(1, 1), ham), 0.1);
  EXPECT_DOUBLE_EQ(output_energy(Eigen::Vector2i(1, -1), ham), -0.1);
}

TEST(Hamiltonian, EnergyMatchesMatrixForm) {
  const OutputHamiltonian ham = [] {
    OutputHamiltonian h(3);
    h.set(TermId::Pair(0, 1), 0.2);
    h.set(TermId::Pair(1, 2), -0.4);
    h.set(TermId::Single(0), 0.1);
    h.set(TermId::Single(2), 0.3);
    return h;
  }();
  for (std::uint64_t s = 0; s < 8; ++s) {
    const Eigen::VectorXd sigma = config_from_index(3, s).cast<double>();
    const double matrix = 0.5 * sigma.dot(ham.coupling_matrix() * sigma) + ham.fields().dot(sigma);
    EXPECT_NEAR(output_energy(config_from_index(3, s), ham), matrix, 1e-15);
    EXPECT_NEAR(output_energy(config_from_index(3, s), ham), testing::brute_energy(s, ham.terms), 1e-15);
  }
}

TEST(LocalEnergy, Examples) {
  const Topology topo(2, {{0, 1}});
  const InputInstance inst(topo, Eigen::Vector3d(-0.05, 0.05, 0.0));
  EXPECT_EQ(local_energy(0, Eigen::Vector2i(1, 1), inst, ResponseModel::zeros(topo, MaskPreset::kFull)), 0.0);
  EXPECT_NEAR(local_energy(0, Eigen::Vector2i(1, 1), inst, ResponseModel::identity(topo, MaskPreset::kFull)), 0.0,
              1e-17);
}

TEST(LocalEnergy, OddnessAndLinearity) {
  const Topology topo = Topology::complete(3);
  const ResponseModel a = random_planted_model(topo, MaskPreset::kFull, PlantedScales{0.2, 0.3, 0.4, 1.0}, 1);
  const ResponseModel b = random_planted_model(topo, MaskPreset::kFull, PlantedScales{0.2, 0.3, 0.4, 1.0}, 2);
  const InputInstance inst(topo, (Eigen::VectorXd(6) << 0.3, -0.2, 0.5, 0.1, -0.7, 0.2).finished());
  const double alpha = 0.37;
  ResponseModel mix = ResponseModel::zeros(topo, MaskPreset::kFull);
  for (const auto& term : mix.term_ids()) {
    ResponseTermParams p = a.at(term);
    const auto& q = b.at(term);
    p.c = alpha * p.c + (1 - alpha) * q.c;
    p.beta = alpha * p.beta + (1 - alpha) * q.beta;
    p.chi = alpha * p.chi + (1 - alpha) * q.chi;
    mix.set(term, p);
  }
  for (std::uint64_t s = 0; s < 8; ++s) {
    const Eigen::VectorXi sigma = config_from_index(3, s);
    for (std::size_t i = 0; i < 3; ++i) {
      Eigen::VectorXi flipped = sigma;
      flipped(static_cast<Eigen::Index>(i)) *= -1;
      EXPECT_NEAR(local_energy(i, flipped, inst, a), -local_energy(i, sigma, inst, a), 1e-14);
      EXPECT_NEAR(local_energy(i, sigma, inst, mix),
                  alpha * local_energy(i, sigma, inst, a) + (1 - alpha) * local_energy(i, sigma, inst, b), 1e-12);
      EXPECT_NEAR(local_energy(i, sigma, inst, a),
                  testing::brute_local_energy(i, s, testing::brute_outputs(inst.theta, a)), 1e-13);
    }
  }
}

TEST(Spins, IndexConvention) {
  EXPECT_EQ(config_index(Eigen::Vector3i(1, -1, -1)), 1u);
  EXPECT_EQ(config_index(Eigen::Vector3i(-1, -1, 1)), 4u);
  for (std::uint64_t s = 0; s < 16; ++s) EXPECT_EQ(config_index(config_from_index(4, s)), s);
  EXPECT_THROW(validate_spins(Eigen::Vector2i(1, 0)), std::invalid_argument);
}

TEST(Spins, SampleSetValidation) {
  Eigen::MatrixXi rows(2, 2);
  rows << 1, -1, -1, -1;
  EXPECT_THROW(SampleSet(2, rows, Eigen::Vector2d(1.0, -1.0)), std::invalid_argument);
  EXPECT_THROW(SampleSet(2, rows, Eigen::Vector2d(0.0, 0.0)), std::invalid_argument);
  rows(0, 0) = 2;
  EXPECT_THROW(SampleSet::from_shots(2, rows), std::invalid_argument);
}

TEST(Spins, HistogramMergesRows) {
  Eigen::MatrixXi rows(3, 2);
  rows << 1, 1, -1, 1, 1, 1;
  const SampleSet s = SampleSet::from_shots(2, rows);
  EXPECT_EQ(s.total_weight(), 3.0);
  const auto hist = s.histogram();
  EXPECT_EQ(hist.at(3), 2.0);
  EXPECT_EQ(hist.at(2), 1.0);
}

}  // namespace
}  // namespace isr
