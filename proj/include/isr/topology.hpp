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

#ifndef ISR_TOPOLOGY_HPP_
#define ISR_TOPOLOGY_HPP_

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace isr {

using Edge = std::pair<std::size_t, std::size_t>;

/// Identifies one term of an Ising energy: a coupling on the pair (i, j) with
/// i < j, or a field on qubit i. Pairs order before singles, each
/// lexicographically, which matches the canonical input-parameter order.
struct TermId {
  enum class Kind : int { kPair = 0, kSingle = 1 };

  Kind kind = Kind::kSingle;
  std::size_t i = 0;
  std::size_t j = 0;  // equals i for singles

  static TermId Pair(std::size_t a, std::size_t b);
  static TermId Single(std::size_t a) { return TermId{Kind::kSingle, a, a}; }

  bool is_pair() const { return kind == Kind::kPair; }
  bool is_single() const { return kind == Kind::kSingle; }
  bool touches(std::size_t q) const { return i == q || j == q; }
  /// For a pair touching q, the other endpoint.
  std::size_t other(std::size_t q) const { return i == q ? j : i; }

  /// "J_0_1" or "h_2".
  std::string label() const;
  static TermId parse(const std::string& label);

  auto operator<=>(const TermId&) const = default;
};

/// Simple undirected interaction graph on n qubits. Edges are stored
/// normalized (i < j) and sorted lexicographically.
class Topology {
 public:
  Topology() = default;
  /// Throws std::invalid_argument on a malformed edge list. Edges may be
  /// given in either orientation.
  Topology(std::size_t n, std::vector<Edge> edges);

  static Topology complete(std::size_t n);
  static Topology chain(std::size_t n);
  static Topology empty(std::size_t n) { return Topology(n, {}); }

  std::size_t num_qubits() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }
  /// Number of programmable input parameters, |edges| + n.
  std::size_t dimension() const { return edges_.size() + n_; }

  bool has_edge(std::size_t i, std::size_t j) const;

  /// Every pair term plus every single term: the default output term set.
  std::vector<TermId> all_output_terms() const;
  /// Only the terms programmable on this topology.
  std::vector<TermId> input_terms() const;

  bool operator==(const Topology&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

/// Position of every input parameter inside theta: edge couplings in
/// lexicographic order, then fields in qubit order.
std::map<TermId, std::size_t> canonical_index(const Topology& topology);

/// Input parameter labels in canonical order.
std::vector<std::string> canonical_labels(const Topology& topology);

/// Programmed input Hamiltonian parameters on a topology.
struct InputInstance {
  Topology topology;
  Eigen::VectorXd theta;

  InputInstance() = default;
  /// Throws std::invalid_argument unless theta.size() == topology.dimension().
  InputInstance(Topology topo, Eigen::VectorXd values);

  std::size_t dimension() const { return static_cast<std::size_t>(theta.size()); }
  double coupling(std::size_t i, std::size_t j) const;
  double field(std::size_t i) const;
};

/// Energy of the input Hamiltonian, sum J s_i s_j + sum h s_i.
double input_energy(const InputInstance& instance,
                    const Eigen::Ref<const Eigen::VectorXi>& sigma);

}  // namespace isr

#endif  // ISR_TOPOLOGY_HPP_
