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

// Exact Gibbs enumeration and a planted-response synthetic device.

#ifndef ISR_ORACLE_HPP_
#define ISR_ORACLE_HPP_

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "isr/dataset.hpp"
#include "isr/hamiltonian.hpp"
#include "isr/response.hpp"
#include "isr/spins.hpp"

namespace isr {

inline constexpr std::size_t kMaxEnumerationQubits = 20;

/// Probability of every configuration, indexed as in config_index().
struct ProbabilityTable {
  std::size_t n = 0;
  Eigen::VectorXd probabilities;
  double log_partition = 0.0;

  double probability(const Eigen::Ref<const Eigen::VectorXi>& sigma) const {
    return probabilities(static_cast<Eigen::Index>(config_index(sigma)));
  }
  /// <s_i> for every qubit.
  Eigen::VectorXd magnetizations() const;
  /// <s_i s_j>, unit diagonal.
  Eigen::MatrixXd correlations() const;
};

/// P(s) = exp(E(s)) / Z over all 2^n configurations. Throws
/// std::invalid_argument for n > kMaxEnumerationQubits.
ProbabilityTable enumerate_distribution(const OutputHamiltonian& ham);

/// m unit-weight i.i.d. draws, deterministic in seed. m == 0 yields an empty,
/// default-constructed SampleSet.
SampleSet exact_sample(const ProbabilityTable& table, std::size_t m, std::uint64_t seed);

/// One row per configuration weighted by its probability, so sample averages
/// are exact expectations.
SampleSet as_exact_sampleset(const ProbabilityTable& table);

struct ExactMode {};
struct ShotMode {
  std::size_t shots = 0;
};
using SamplingMode = std::variant<ExactMode, ShotMode>;

/// Magnitudes of a random planted response. Every free coefficient is drawn
/// uniformly from [-scale, scale] for its kind; terms that are also input
/// parameters additionally get `diagonal` added to beta at their own slot.
struct PlantedScales {
  double constant = 0.05;
  double linear = 0.1;
  double quadratic = 0.1;
  double diagonal = 1.0;
};

/// Random response model over the given output terms (default: all), with
/// the preset's mask applied. Deterministic in seed.
ResponseModel random_planted_model(const Topology& topology, MaskPreset preset, const PlantedScales& scales,
                                   std::uint64_t seed, std::vector<TermId> terms = {});

/// For each instance: output Hamiltonian from the planted response, its Gibbs
/// table, then samples per mode. Instance k draws from stream k of the seed.
Dataset generate_synthetic_dataset(const ResponseModel& planted, const std::vector<InputInstance>& instances,
                                   const SamplingMode& mode, std::uint64_t seed);

}  // namespace isr

#endif  // ISR_ORACLE_HPP_
