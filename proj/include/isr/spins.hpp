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

#ifndef ISR_SPINS_HPP_
#define ISR_SPINS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>

#include <Eigen/Core>

namespace isr {

/// A configuration of n spins, each +1 or -1.
using SpinConfiguration = Eigen::VectorXi;

/// Throws std::invalid_argument if any entry is not +1 or -1.
void validate_spins(const Eigen::Ref<const Eigen::VectorXi>& sigma);

/// Configuration encoding: qubit 0 is the least significant bit, -1 maps to
/// bit 0 and +1 to bit 1.
std::uint64_t config_index(const Eigen::Ref<const Eigen::VectorXi>& sigma);
SpinConfiguration config_from_index(std::size_t n, std::uint64_t index);

/// Weighted spin configurations observed for one instance. Unit weights are
/// measurement shots; fractional weights encode an exact distribution.
class SampleSet {
 public:
  SampleSet() = default;
  /// spins is rows x n with entries in {+1, -1}; weights are nonnegative with
  /// a positive sum. Throws std::invalid_argument otherwise.
  SampleSet(std::size_t n, Eigen::MatrixXi spins, Eigen::VectorXd weights);

  /// Unit-weight rows.
  static SampleSet from_shots(std::size_t n, Eigen::MatrixXi spins);
  /// One row per configuration index (see config_index) with its weight.
  static SampleSet from_histogram(std::size_t n,
                                  const std::map<std::uint64_t, double>& hist);

  std::size_t num_qubits() const { return n_; }
  std::size_t num_rows() const { return static_cast<std::size_t>(weights_.size()); }
  const Eigen::MatrixXi& spins() const { return spins_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double total_weight() const { return total_weight_; }

  /// Rows merged by configuration, ordered by configuration index. The
  /// interaction-screening loss depends on the samples only through this.
  std::map<std::uint64_t, double> histogram() const;

  bool operator==(const SampleSet& other) const;

 private:
  std::size_t n_ = 0;
  Eigen::MatrixXi spins_;
  Eigen::VectorXd weights_;
  double total_weight_ = 0.0;
};

}  // namespace isr

#endif  // ISR_SPINS_HPP_
