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

#ifndef ISR_HAMILTONIAN_HPP_
#define ISR_HAMILTONIAN_HPP_

#include <cstddef>
#include <map>

#include <Eigen/Core>

#include "isr/topology.hpp"

namespace isr {

/// Effective classical Ising energy of a device output. Probabilities are
/// proportional to exp(+energy); there is no Boltzmann minus sign. The term
/// map may hold pairs that are absent from the programmed topology.
struct OutputHamiltonian {
  std::size_t n = 0;
  std::map<TermId, double> terms;

  OutputHamiltonian() = default;
  explicit OutputHamiltonian(std::size_t num_qubits) : n(num_qubits) {}

  /// Missing terms read as zero.
  double value(const TermId& term) const;
  /// Throws std::invalid_argument if the term is out of range.
  void set(const TermId& term, double v);

  /// Dense views: symmetric couplings with zero diagonal, and fields.
  Eigen::MatrixXd coupling_matrix() const;
  Eigen::VectorXd fields() const;

  double max_abs() const;
};

/// Output Hamiltonian equal to the input Hamiltonian of an instance.
OutputHamiltonian from_input(const InputInstance& instance);

/// sum_{i<j} J_ij s_i s_j + sum_i h_i s_i. Throws std::invalid_argument on a
/// length mismatch.
double output_energy(const Eigen::Ref<const Eigen::VectorXi>& sigma,
                     const OutputHamiltonian& ham);

}  // namespace isr

#endif  // ISR_HAMILTONIAN_HPP_
