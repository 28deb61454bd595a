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

#include "isr/spins.hpp"

#include <cmath>
#include <string>

namespace isr {

void validate_spins(const Eigen::Ref<const Eigen::VectorXi>& sigma) {
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) != 1 && sigma(i) != -1) {
      throw std::invalid_argument("spin " + std::to_string(i) + " is " + std::to_string(sigma(i)) +
                                  ", expected +1 or -1");
    }
  }
}

std::uint64_t config_index(const Eigen::Ref<const Eigen::VectorXi>& sigma) {
  if (sigma.size() > 64) throw std::invalid_argument("config_index: more than 64 spins");
  std::uint64_t index = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > 0) index |= std::uint64_t{1} << i;
  }
  return index;
}

SpinConfiguration config_from_index(std::size_t n, std::uint64_t index) {
  SpinConfiguration sigma(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) sigma(static_cast<Eigen::Index>(i)) = ((index >> i) & 1U) ? 1 : -1;
  return sigma;
}

SampleSet::SampleSet(std::size_t n, Eigen::MatrixXi spins, Eigen::VectorXd weights)
    : n_(n), spins_(std::move(spins)), weights_(std::move(weights)) {
  if (n_ == 0) throw std::invalid_argument("SampleSet: qubit count must be positive");
  if (static_cast<std::size_t>(spins_.cols()) != n_) {
    throw std::invalid_argument("SampleSet: rows have " + std::to_string(spins_.cols()) +
                                " spins, expected " + std::to_string(n_));
  }
  if (spins_.rows() != weights_.size()) {
    throw std::invalid_argument("SampleSet: row and weight counts differ");
  }
  for (Eigen::Index r = 0; r < spins_.rows(); ++r) {
    validate_spins(spins_.row(r).transpose());
    if (!(weights_(r) >= 0.0) || !std::isfinite(weights_(r))) {
      throw std::invalid_argument("SampleSet: row " + std::to_string(r) + " has invalid weight " +
                                  std::to_string(weights_(r)));
    }
  }
  total_weight_ = weights_.sum();
  if (!(total_weight_ > 0.0)) throw std::invalid_argument("SampleSet: total weight must be positive");
}

SampleSet SampleSet::from_shots(std::size_t n, Eigen::MatrixXi spins) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(spins.rows());
  return SampleSet(n, std::move(spins), std::move(w));
}

SampleSet SampleSet::from_histogram(std::size_t n, const std::map<std::uint64_t, double>& hist) {
  Eigen::MatrixXi spins(static_cast<Eigen::Index>(hist.size()), static_cast<Eigen::Index>(n));
  Eigen::VectorXd w(static_cast<Eigen::Index>(hist.size()));
  Eigen::Index r = 0;
  for (const auto& [index, weight] : hist) {
    spins.row(r) = config_from_index(n, index).transpose();
    w(r++) = weight;
  }
  return SampleSet(n, std::move(spins), std::move(w));
}

std::map<std::uint64_t, double> SampleSet::histogram() const {
  std::map<std::uint64_t, double> hist;
  for (Eigen::Index r = 0; r < spins_.rows(); ++r) {
    hist[config_index(spins_.row(r).transpose())] += weights_(r);
  }
  return hist;
}

bool SampleSet::operator==(const SampleSet& other) const {
  return n_ == other.n_ && spins_.rows() == other.spins_.rows() && spins_ == other.spins_ &&
         weights_ == other.weights_;
}

}  // namespace isr
