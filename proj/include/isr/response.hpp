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

#ifndef ISR_RESPONSE_HPP_
#define ISR_RESPONSE_HPP_

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "isr/features.hpp"
#include "isr/hamiltonian.hpp"
#include "isr/topology.hpp"

namespace isr {

/// Which response coefficients are free.
///   kFull      every beta and chi entry
///   kPhysical  as kFull, except output pairs absent from the input topology
///              keep only (c, beta)
///   kLinear    chi pinned to zero
///   kConstant  beta and chi pinned to zero (single-instance reconstruction)
enum class MaskPreset { kFull, kPhysical, kLinear, kConstant };

std::string to_string(MaskPreset preset);
/// Accepts "full", "physical", "linear", "constant".
MaskPreset parse_mask_preset(const std::string& name);

/// Quadratic response of one output term, c + theta^T beta + theta^T chi theta.
/// Entries whose free flag is false are pinned to zero.
template <typename Scalar>
struct BasicResponseTermParams {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Scalar c = Scalar(0);
  Vector beta;
  Matrix chi;  // symmetric
  Eigen::Array<bool, Eigen::Dynamic, 1> beta_free;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> chi_free;  // symmetric

  static BasicResponseTermParams zeros(std::size_t dim, bool linear_free, bool quadratic_free) {
    const auto d = static_cast<Eigen::Index>(dim);
    BasicResponseTermParams p;
    p.beta = Vector::Zero(d);
    p.chi = Matrix::Zero(d, d);
    p.beta_free = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(d, linear_free);
    p.chi_free = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(d, d, quadratic_free);
    return p;
  }

  std::size_t dimension() const { return static_cast<std::size_t>(beta.size()); }

  /// Zeroes pinned entries and symmetrizes chi from its upper triangle.
  void enforce_mask() {
    for (Eigen::Index a = 0; a < beta.size(); ++a) {
      if (!beta_free(a)) beta(a) = Scalar(0);
      for (Eigen::Index b = a; b < beta.size(); ++b) {
        if (!chi_free(a, b)) chi(a, b) = Scalar(0);
        chi(b, a) = chi(a, b);
      }
    }
  }

  std::size_t num_free() const {
    std::size_t count = 1 + static_cast<std::size_t>(beta_free.count());
    for (Eigen::Index a = 0; a < beta.size(); ++a) {
      for (Eigen::Index b = a; b < beta.size(); ++b) count += chi_free(a, b) ? 1 : 0;
    }
    return count;
  }

  bool operator==(const BasicResponseTermParams& o) const {
    return c == o.c && beta == o.beta && chi == o.chi &&
           (beta_free == o.beta_free).all() && (chi_free == o.chi_free).all();
  }
};

using ResponseTermParams = BasicResponseTermParams<double>;

/// c + theta^T beta + theta^T chi theta. Throws std::invalid_argument on a
/// dimension mismatch.
template <typename Derived, typename Scalar>
typename Derived::Scalar response_eval(const Eigen::MatrixBase<Derived>& theta,
                                       const BasicResponseTermParams<Scalar>& params) {
  if (static_cast<std::size_t>(theta.size()) != params.dimension()) {
    throw std::invalid_argument("response_eval: theta has length " +
                                std::to_string(theta.size()) + ", expected " +
                                std::to_string(params.dimension()));
  }
  using T = typename Derived::Scalar;
  const auto beta = params.beta.template cast<T>();
  const auto chi = params.chi.template cast<T>();
  return T(params.c) + theta.dot(beta) + theta.dot(chi * theta);
}

/// Coefficients in the feature layout of features.hpp.
Eigen::VectorXd to_feature_coefficients(const ResponseTermParams& params);
/// Free flags in the feature layout; slot 0 (the constant) is always free.
Eigen::Array<bool, Eigen::Dynamic, 1> feature_mask(const ResponseTermParams& params);
/// Inverse of to_feature_coefficients for a given mask. Pinned slots must be 0.
ResponseTermParams from_feature_coefficients(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                                             const Eigen::Array<bool, Eigen::Dynamic, 1>& mask,
                                             std::size_t dim);

/// Zero parameters whose free structure follows the preset for this term.
ResponseTermParams masked_zeros(const TermId& term, const Topology& topology, MaskPreset preset);

/// Map from programmed input parameters to output Hamiltonian parameters: one
/// quadratic response per modeled output term.
class ResponseModel {
 public:
  ResponseModel() = default;
  /// Throws std::invalid_argument if a term is out of range or a parameter
  /// block has the wrong dimension.
  ResponseModel(Topology topology, MaskPreset preset,
                std::map<TermId, ResponseTermParams> terms);

  /// All-zero model over the given output terms (default: every pair and
  /// every single).
  static ResponseModel zeros(const Topology& topology, MaskPreset preset,
                             std::vector<TermId> terms = {});
  /// Ideal Gibbs sampler at inverse temperature `scale`: each modeled term
  /// that is also an input parameter gets beta = scale at its own slot.
  static ResponseModel identity(const Topology& topology, MaskPreset preset,
                                double scale = 1.0, std::vector<TermId> terms = {});

  const Topology& topology() const { return topology_; }
  MaskPreset preset() const { return preset_; }
  std::size_t num_qubits() const { return topology_.num_qubits(); }
  std::size_t dimension() const { return topology_.dimension(); }

  const std::map<TermId, ResponseTermParams>& terms() const { return terms_; }
  std::vector<TermId> term_ids() const;
  bool has_term(const TermId& term) const { return terms_.count(term) != 0; }
  const ResponseTermParams& at(const TermId& term) const;
  /// Replaces a parameter block; the mask of `params` is kept and enforced.
  void set(const TermId& term, ResponseTermParams params);

  /// Modeled terms touching qubit q, in model order.
  std::vector<TermId> terms_touching(std::size_t q) const;
  std::size_t num_free() const;

  bool operator==(const ResponseModel& other) const;

 private:
  Topology topology_;
  MaskPreset preset_ = MaskPreset::kPhysical;
  std::map<TermId, ResponseTermParams> terms_;
};

/// One output value per modeled term. Throws std::invalid_argument on a
/// topology mismatch.
OutputHamiltonian predict_output(const InputInstance& instance, const ResponseModel& model);

/// s_i F_i(theta) + s_i sum_{j != i} s_j F_ij(theta), over modeled terms.
double local_energy(std::size_t qubit, const Eigen::Ref<const Eigen::VectorXi>& sigma,
                    const InputInstance& instance, const ResponseModel& model);

}  // namespace isr

#endif  // ISR_RESPONSE_HPP_
