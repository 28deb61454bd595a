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

// Interaction-screening loss over many input instances.
//
// For qubit i the loss is
//
//   L_i(Lambda) = sum_k a_k sum_r w_kr exp(-E_i(sigma_kr, theta_k, Lambda))
//
// where a_k weights instances (uniform 1/M by default), w_kr are the sample
// weights of instance k normalized to one, and E_i is the local energy of
// qubit i. E_i is linear in the free response coefficients, so L_i is convex.

#ifndef ISR_SCREENING_HPP_
#define ISR_SCREENING_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "isr/dataset.hpp"
#include "isr/response.hpp"

namespace isr {

enum class InstanceWeighting {
  kUniform,  // 1/M per instance regardless of shot count
  kShots,    // proportional to each sample set's total weight
};

/// The response coefficients that enter the local energy of one qubit: every
/// modeled term touching it.
struct LocalResponse {
  std::size_t qubit = 0;
  std::vector<TermId> terms;
  std::vector<ResponseTermParams> params;

  static LocalResponse zeros(std::size_t qubit, const Topology& topology, MaskPreset preset,
                             const std::vector<TermId>& model_terms);
  static LocalResponse from_model(const ResponseModel& model, std::size_t qubit);

  std::size_t dimension() const { return params.empty() ? 0 : params.front().dimension(); }
  std::size_t num_free() const;
  /// Free coefficients, term by term: c, free beta entries in slot order,
  /// free chi entries (a <= b) row-major.
  Eigen::VectorXd free_parameters() const;
  void set_free_parameters(const Eigen::Ref<const Eigen::VectorXd>& x);
  /// Labels matching free_parameters(), e.g. "J_0_1:beta[3]".
  std::vector<std::string> free_labels() const;
};

/// Precomputed loss for one qubit. Rows of each sample set are merged by
/// configuration, so evaluation cost scales with distinct configurations.
class ScreeningObjective {
 public:
  /// Throws std::invalid_argument on an empty dataset or a layout that does
  /// not match the dataset.
  ScreeningObjective(const Dataset& data, const LocalResponse& layout,
                     InstanceWeighting weighting = InstanceWeighting::kUniform);

  std::size_t num_free() const { return num_free_; }
  std::size_t num_terms() const { return term_slots_.size(); }
  std::size_t num_instances() const { return static_cast<std::size_t>(instance_weight_.size()); }

  double value(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Returns the loss and writes its gradient with respect to x.
  double value_and_gradient(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXd& grad) const;

  /// Loss and gradient of a single instance (weight one), for online steps.
  double instance_value_and_gradient(std::size_t k, const Eigen::Ref<const Eigen::VectorXd>& x,
                                     Eigen::VectorXd& grad) const;

  /// Loss of instance k (weight one) and its first two derivatives with
  /// respect to the term responses at that instance's input. With
  /// v_r = w_r exp(-E_r) / total and s_rt the sign pattern of term t,
  /// pull_t = sum_r v_r s_rt and curvature = sum_r v_r s_r s_r^T, so the
  /// gradient block of term t is -pull_t times the term's features.
  double instance_response_derivatives(std::size_t k, const Eigen::Ref<const Eigen::VectorXd>& x,
                                       Eigen::VectorXd& pull, Eigen::MatrixXd& curvature) const;
  /// Free features of one term at instance k.
  Eigen::VectorXd instance_features(std::size_t term, std::size_t k) const {
    return term_features_.at(term).col(static_cast<Eigen::Index>(k));
  }

  /// Weighted second moment of the free features of one term,
  /// sum_k a_k phi_k phi_k^T restricted to that term's free slots.
  Eigen::MatrixXd feature_moment(std::size_t term) const;
  /// Offset of a term's block inside x.
  std::size_t block_offset(std::size_t term) const { return block_offset_[term]; }
  std::size_t block_size(std::size_t term) const { return term_slots_[term].size(); }

 private:
  // Local energies of every merged row for coefficients x; rows of instance
  // k occupy [row_offset_[k], row_offset_[k+1]).
  Eigen::VectorXd energies(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // Contribution of instance k (without a_k) given all row energies; when
  // pull is non-null it receives sum_r w_r exp(-E_r) z_r / total_k.
  double instance_terms(std::size_t k, const Eigen::Ref<const Eigen::VectorXd>& e,
                        Eigen::VectorXd* pull, Eigen::MatrixXd* curvature = nullptr) const;
  // Row energies of instance k alone.
  Eigen::VectorXd instance_energies(std::size_t k, const Eigen::Ref<const Eigen::VectorXd>& x) const;

  std::size_t num_free_ = 0;
  std::vector<std::vector<Eigen::Index>> term_slots_;  // free feature slots per term
  std::vector<std::size_t> block_offset_;
  std::vector<Eigen::MatrixXd> term_features_;  // |slots| x M per term
  Eigen::VectorXd instance_weight_;             // unnormalized a_k
  double weight_sum_ = 0.0;
  Eigen::VectorXd instance_total_;              // sum of row weights per instance
  std::vector<Eigen::Index> row_offset_;
  Eigen::MatrixXd row_signs_;   // R x T, entries of sigma_i * (1 or sigma_j)
  Eigen::VectorXd row_weight_;
};

/// Interaction-screening loss of `lambda` on the dataset.
double is_loss(std::size_t qubit, const Dataset& data, const LocalResponse& lambda,
               InstanceWeighting weighting = InstanceWeighting::kUniform);

/// Gradient of is_loss with respect to lambda.free_parameters().
Eigen::VectorXd is_loss_grad(std::size_t qubit, const Dataset& data, const LocalResponse& lambda,
                             InstanceWeighting weighting = InstanceWeighting::kUniform);

}  // namespace isr

#endif  // ISR_SCREENING_HPP_
