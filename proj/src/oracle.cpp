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

#include "isr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "isr/rng.hpp"

namespace isr {

Eigen::VectorXd ProbabilityTable::magnetizations() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (Eigen::Index s = 0; s < probabilities.size(); ++s) {
    m += probabilities(s) * config_from_index(n, static_cast<std::uint64_t>(s)).cast<double>();
  }
  return m;
}

Eigen::MatrixXd ProbabilityTable::correlations() const {
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index s = 0; s < probabilities.size(); ++s) {
    const Eigen::VectorXd sigma = config_from_index(n, static_cast<std::uint64_t>(s)).cast<double>();
    c.noalias() += probabilities(s) * sigma * sigma.transpose();
  }
  return c;
}

ProbabilityTable enumerate_distribution(const OutputHamiltonian& ham) {
  if (ham.n == 0) throw std::invalid_argument("enumerate_distribution: empty system");
  if (ham.n > kMaxEnumerationQubits) {
    throw std::invalid_argument("enumerate_distribution: n = " + std::to_string(ham.n) + " exceeds " +
                                std::to_string(kMaxEnumerationQubits));
  }
  const std::uint64_t count = std::uint64_t{1} << ham.n;
  const Eigen::MatrixXd J = ham.coupling_matrix();
  const Eigen::VectorXd h = ham.fields();

  ProbabilityTable table;
  table.n = ham.n;
  Eigen::VectorXd energy(static_cast<Eigen::Index>(count));
  for (std::uint64_t s = 0; s < count; ++s) {
    const Eigen::VectorXd sigma = config_from_index(ham.n, s).cast<double>();
    energy(static_cast<Eigen::Index>(s)) = 0.5 * sigma.dot(J * sigma) + h.dot(sigma);
  }
  const double shift = energy.maxCoeff();
  table.probabilities = (energy.array() - shift).exp().matrix();
  const double z = table.probabilities.sum();
  table.probabilities /= z;
  table.log_partition = shift + std::log(z);
  return table;
}

SampleSet exact_sample(const ProbabilityTable& table, std::size_t m, std::uint64_t seed) {
  if (m == 0) return SampleSet();
  const auto size = table.probabilities.size();
  std::vector<double> cdf(static_cast<std::size_t>(size));
  double acc = 0.0;
  for (Eigen::Index s = 0; s < size; ++s) {
    acc += table.probabilities(s);
    cdf[static_cast<std::size_t>(s)] = acc;
  }
  CounterRng rng(seed);
  Eigen::MatrixXi spins(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(table.n));
  for (std::size_t r = 0; r < m; ++r) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    // upper_bound never lands on a zero-probability configuration.
    const auto index = static_cast<std::uint64_t>(it - cdf.begin());
    spins.row(static_cast<Eigen::Index>(r)) = config_from_index(table.n, index).transpose();
  }
  return SampleSet::from_shots(table.n, std::move(spins));
}

SampleSet as_exact_sampleset(const ProbabilityTable& table) {
  const auto size = table.probabilities.size();
  Eigen::MatrixXi spins(size, static_cast<Eigen::Index>(table.n));
  for (Eigen::Index s = 0; s < size; ++s) {
    spins.row(s) = config_from_index(table.n, static_cast<std::uint64_t>(s)).transpose();
  }
  return SampleSet(table.n, std::move(spins), table.probabilities);
}

ResponseModel random_planted_model(const Topology& topology, MaskPreset preset, const PlantedScales& scales,
                                   std::uint64_t seed, std::vector<TermId> terms) {
  ResponseModel model = ResponseModel::identity(topology, preset, scales.diagonal, std::move(terms));
  CounterRng rng(seed);
  auto draw = [&rng](double scale) { return scale * (2.0 * rng.uniform() - 1.0); };
  for (const auto& term : model.term_ids()) {
    ResponseTermParams p = model.at(term);
    p.c += draw(scales.constant);
    const auto d = static_cast<Eigen::Index>(p.dimension());
    for (Eigen::Index a = 0; a < d; ++a) {
      if (p.beta_free(a)) p.beta(a) += draw(scales.linear);
    }
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = a; b < d; ++b) {
        if (p.chi_free(a, b)) p.chi(a, b) = draw(scales.quadratic);
      }
    }
    model.set(term, std::move(p));
  }
  return model;
}

Dataset generate_synthetic_dataset(const ResponseModel& planted, const std::vector<InputInstance>& instances,
                                   const SamplingMode& mode, std::uint64_t seed) {
  Dataset data(planted.topology());
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const ProbabilityTable table = enumerate_distribution(predict_output(instances[k], planted));
    if (std::holds_alternative<ExactMode>(mode)) {
      data.add(instances[k], as_exact_sampleset(table));
    } else {
      const std::size_t shots = std::get<ShotMode>(mode).shots;
      if (shots == 0) throw std::invalid_argument("generate_synthetic_dataset: shot count must be positive");
      // Per-instance streams keep each sample set independent of the others.
      CounterRng stream(seed, k);
      data.add(instances[k], exact_sample(table, shots, stream()));
    }
  }
  return data;
}

}  // namespace isr
