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

#include "isr/topology.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <stdexcept>

namespace isr {

TermId TermId::Pair(std::size_t a, std::size_t b) {
  if (a == b) throw std::invalid_argument("TermId::Pair: self-coupling on qubit " + std::to_string(a));
  if (a > b) std::swap(a, b);
  return TermId{Kind::kPair, a, b};
}

std::string TermId::label() const {
  if (is_pair()) return "J_" + std::to_string(i) + "_" + std::to_string(j);
  return "h_" + std::to_string(i);
}

TermId TermId::parse(const std::string& label) {
  auto bad = [&] { return std::invalid_argument("TermId::parse: bad term label '" + label + "'"); };
  auto number = [&](const std::string& s) -> std::size_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw bad();
    return static_cast<std::size_t>(std::stoull(s));
  };
  if (label.rfind("h_", 0) == 0) return Single(number(label.substr(2)));
  if (label.rfind("J_", 0) == 0) {
    const auto rest = label.substr(2);
    const auto sep = rest.find('_');
    if (sep == std::string::npos) throw bad();
    return Pair(number(rest.substr(0, sep)), number(rest.substr(sep + 1)));
  }
  throw bad();
}

Topology::Topology(std::size_t n, std::vector<Edge> edges) : n_(n) {
  if (n == 0) throw std::invalid_argument("Topology: qubit count must be positive");
  std::set<Edge> seen;
  for (auto [a, b] : edges) {
    if (a == b) throw std::invalid_argument("Topology: self-loop on qubit " + std::to_string(a));
    if (a >= n || b >= n) {
      throw std::invalid_argument("Topology: edge (" + std::to_string(a) + ", " +
                                  std::to_string(b) + ") out of range for n = " + std::to_string(n));
    }
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) {
      throw std::invalid_argument("Topology: duplicate edge (" + std::to_string(a) + ", " +
                                  std::to_string(b) + ")");
    }
  }
  edges_.assign(seen.begin(), seen.end());
}

Topology Topology::complete(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Topology(n, std::move(edges));
}

Topology Topology::chain(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Topology(n, std::move(edges));
}

bool Topology::has_edge(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
}

std::vector<TermId> Topology::all_output_terms() const {
  std::vector<TermId> terms;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) terms.push_back(TermId::Pair(i, j));
  for (std::size_t i = 0; i < n_; ++i) terms.push_back(TermId::Single(i));
  return terms;
}

std::vector<TermId> Topology::input_terms() const {
  std::vector<TermId> terms;
  for (const auto& [a, b] : edges_) terms.push_back(TermId::Pair(a, b));
  for (std::size_t i = 0; i < n_; ++i) terms.push_back(TermId::Single(i));
  return terms;
}

std::map<TermId, std::size_t> canonical_index(const Topology& topology) {
  std::map<TermId, std::size_t> index;
  std::size_t slot = 0;
  for (const auto& term : topology.input_terms()) index.emplace(term, slot++);
  return index;
}

std::vector<std::string> canonical_labels(const Topology& topology) {
  std::vector<std::string> labels;
  for (const auto& term : topology.input_terms()) labels.push_back(term.label());
  return labels;
}

InputInstance::InputInstance(Topology topo, Eigen::VectorXd values)
    : topology(std::move(topo)), theta(std::move(values)) {
  if (static_cast<std::size_t>(theta.size()) != topology.dimension()) {
    throw std::invalid_argument("InputInstance: theta has length " + std::to_string(theta.size()) +
                                ", topology expects " + std::to_string(topology.dimension()));
  }
}

double InputInstance::coupling(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  const auto& edges = topology.edges();
  const auto it = std::lower_bound(edges.begin(), edges.end(), Edge{i, j});
  if (it == edges.end() || *it != Edge{i, j}) return 0.0;
  return theta(it - edges.begin());
}

double InputInstance::field(std::size_t i) const {
  return theta(static_cast<Eigen::Index>(topology.num_edges() + i));
}

double input_energy(const InputInstance& instance, const Eigen::Ref<const Eigen::VectorXi>& sigma) {
  const auto& topo = instance.topology;
  if (static_cast<std::size_t>(sigma.size()) != topo.num_qubits()) {
    throw std::invalid_argument("input_energy: configuration length mismatch");
  }
  double e = 0.0;
  Eigen::Index k = 0;
  for (const auto& [a, b] : topo.edges()) {
    e += instance.theta(k++) * sigma(static_cast<Eigen::Index>(a)) * sigma(static_cast<Eigen::Index>(b));
  }
  for (Eigen::Index i = 0; i < sigma.size(); ++i) e += instance.theta(k++) * sigma(i);
  return e;
}

}  // namespace isr
