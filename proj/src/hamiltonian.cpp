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

#include "isr/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace isr {

double OutputHamiltonian::value(const TermId& term) const {
  const auto it = terms.find(term);
  return it == terms.end() ? 0.0 : it->second;
}

void OutputHamiltonian::set(const TermId& term, double v) {
  if (term.i >= n || term.j >= n) {
    throw std::invalid_argument("OutputHamiltonian: term " + term.label() + " out of range for n = " +
                                std::to_string(n));
  }
  terms[term] = v;
}

Eigen::MatrixXd OutputHamiltonian::coupling_matrix() const {
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(size, size);
  for (const auto& [term, v] : terms) {
    if (!term.is_pair()) continue;
    J(static_cast<Eigen::Index>(term.i), static_cast<Eigen::Index>(term.j)) = v;
    J(static_cast<Eigen::Index>(term.j), static_cast<Eigen::Index>(term.i)) = v;
  }
  return J;
}

Eigen::VectorXd OutputHamiltonian::fields() const {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& [term, v] : terms) {
    if (term.is_single()) h(static_cast<Eigen::Index>(term.i)) = v;
  }
  return h;
}

double OutputHamiltonian::max_abs() const {
  double m = 0.0;
  for (const auto& [term, v] : terms) m = std::max(m, std::abs(v));
  return m;
}

OutputHamiltonian from_input(const InputInstance& instance) {
  OutputHamiltonian ham(instance.topology.num_qubits());
  const auto index = canonical_index(instance.topology);
  for (const auto& [term, slot] : index) ham.set(term, instance.theta(static_cast<Eigen::Index>(slot)));
  return ham;
}

double output_energy(const Eigen::Ref<const Eigen::VectorXi>& sigma, const OutputHamiltonian& ham) {
  if (static_cast<std::size_t>(sigma.size()) != ham.n) {
    throw std::invalid_argument("output_energy: configuration has " + std::to_string(sigma.size()) +
                                " spins, Hamiltonian has " + std::to_string(ham.n));
  }
  double e = 0.0;
  for (const auto& [term, v] : ham.terms) {
    const int si = sigma(static_cast<Eigen::Index>(term.i));
    e += term.is_pair() ? v * si * sigma(static_cast<Eigen::Index>(term.j)) : v * si;
  }
  return e;
}

}  // namespace isr
