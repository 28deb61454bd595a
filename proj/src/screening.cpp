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

#include "isr/screening.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "isr/features.hpp"

namespace isr {

LocalResponse LocalResponse::zeros(std::size_t qubit, const Topology& topology, MaskPreset preset,
                                   const std::vector<TermId>& model_terms) {
  LocalResponse local;
  local.qubit = qubit;
  for (const auto& term : model_terms) {
    if (!term.touches(qubit)) continue;
    local.terms.push_back(term);
    local.params.push_back(masked_zeros(term, topology, preset));
  }
  return local;
}

LocalResponse LocalResponse::from_model(const ResponseModel& model, std::size_t qubit) {
  LocalResponse local;
  local.qubit = qubit;
  for (const auto& term : model.terms_touching(qubit)) {
    local.terms.push_back(term);
    local.params.push_back(model.at(term));
  }
  return local;
}

std::size_t LocalResponse::num_free() const {
  std::size_t count = 0;
  for (const auto& p : params) count += p.num_free();
  return count;
}

Eigen::VectorXd LocalResponse::free_parameters() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(num_free()));
  Eigen::Index k = 0;
  for (const auto& p : params) {
    const Eigen::VectorXd w = to_feature_coefficients(p);
    const auto mask = feature_mask(p);
    for (Eigen::Index s = 0; s < w.size(); ++s) {
      if (mask(s)) x(k++) = w(s);
    }
  }
  return x;
}

void LocalResponse::set_free_parameters(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (static_cast<std::size_t>(x.size()) != num_free()) {
    throw std::invalid_argument("LocalResponse: expected " + std::to_string(num_free()) +
                                " free parameters, got " + std::to_string(x.size()));
  }
  Eigen::Index k = 0;
  for (auto& p : params) {
    const auto mask = feature_mask(p);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(mask.size());
    for (Eigen::Index s = 0; s < w.size(); ++s) {
      if (mask(s)) w(s) = x(k++);
    }
    p = from_feature_coefficients(w, mask, p.dimension());
  }
}

std::vector<std::string> LocalResponse::free_labels() const {
  std::vector<std::string> labels;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& p = params[t];
    const std::string prefix = terms[t].label() + ":";
    labels.push_back(prefix + "c");
    const auto d = static_cast<Eigen::Index>(p.dimension());
    for (Eigen::Index a = 0; a < d; ++a) {
      if (p.beta_free(a)) labels.push_back(prefix + "beta[" + std::to_string(a) + "]");
    }
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = a; b < d; ++b) {
        if (p.chi_free(a, b)) {
          labels.push_back(prefix + "chi[" + std::to_string(a) + "," + std::to_string(b) + "]");
        }
      }
    }
  }
  return labels;
}

ScreeningObjective::ScreeningObjective(const Dataset& data, const LocalResponse& layout,
                                       InstanceWeighting weighting) {
  if (data.empty()) throw std::invalid_argument("interaction screening: empty dataset");
  const std::size_t n = data.topology().num_qubits();
  const std::size_t dim = data.topology().dimension();
  const std::size_t q = layout.qubit;
  if (q >= n) throw std::invalid_argument("interaction screening: qubit out of range");
  if (layout.terms.size() != layout.params.size()) {
    throw std::invalid_argument("interaction screening: malformed local response");
  }
  for (std::size_t t = 0; t < layout.terms.size(); ++t) {
    if (!layout.terms[t].touches(q) || layout.terms[t].i >= n || layout.terms[t].j >= n) {
      throw std::invalid_argument("interaction screening: term " + layout.terms[t].label() +
                                  " does not touch qubit " + std::to_string(q));
    }
    if (layout.params[t].dimension() != dim) {
      throw std::invalid_argument("interaction screening: response of " + layout.terms[t].label() +
                                  " has dimension " + std::to_string(layout.params[t].dimension()) +
                                  ", dataset has " + std::to_string(dim));
    }
  }

  const auto num_terms = layout.terms.size();
  const auto M = static_cast<Eigen::Index>(data.size());

  Eigen::MatrixXd phi(static_cast<Eigen::Index>(feature_count(dim)), M);
  for (Eigen::Index k = 0; k < M; ++k) {
    phi.col(k) = quadratic_features(data.instance(static_cast<std::size_t>(k)).theta);
  }

  term_slots_.resize(num_terms);
  block_offset_.resize(num_terms);
  term_features_.resize(num_terms);
  for (std::size_t t = 0; t < num_terms; ++t) {
    const auto mask = feature_mask(layout.params[t]);
    for (Eigen::Index s = 0; s < mask.size(); ++s) {
      if (mask(s)) term_slots_[t].push_back(s);
    }
    block_offset_[t] = num_free_;
    num_free_ += term_slots_[t].size();
    term_features_[t] = phi(term_slots_[t], Eigen::all);
  }

  instance_weight_.resize(M);
  std::vector<std::map<std::uint64_t, double>> hists(static_cast<std::size_t>(M));
  std::size_t total_rows = 0;
  for (Eigen::Index k = 0; k < M; ++k) {
    const auto& s = data.samples(static_cast<std::size_t>(k));
    hists[static_cast<std::size_t>(k)] = s.histogram();
    total_rows += hists[static_cast<std::size_t>(k)].size();
    instance_weight_(k) = weighting == InstanceWeighting::kUniform ? 1.0 : s.total_weight();
  }
  weight_sum_ = 0.0;
  for (Eigen::Index k = 0; k < M; ++k) weight_sum_ += instance_weight_(k);

  row_signs_.resize(static_cast<Eigen::Index>(total_rows), static_cast<Eigen::Index>(num_terms));
  row_weight_.resize(static_cast<Eigen::Index>(total_rows));
  instance_total_.resize(M);
  row_offset_.assign(1, 0);
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < M; ++k) {
    double total = 0.0;
    for (const auto& [index, weight] : hists[static_cast<std::size_t>(k)]) {
      const double si = ((index >> q) & 1U) ? 1.0 : -1.0;
      for (std::size_t t = 0; t < num_terms; ++t) {
        const auto& term = layout.terms[t];
        const double sj = term.is_pair() ? (((index >> term.other(q)) & 1U) ? 1.0 : -1.0) : 1.0;
        row_signs_(r, static_cast<Eigen::Index>(t)) = si * sj;
      }
      row_weight_(r) = weight;
      total += weight;
      ++r;
    }
    instance_total_(k) = total;
    row_offset_.push_back(r);
  }
}

Eigen::VectorXd ScreeningObjective::energies(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != num_free_) {
    throw std::invalid_argument("interaction screening: expected " + std::to_string(num_free_) +
                                " parameters, got " + std::to_string(x.size()));
  }
  const auto M = instance_weight_.size();
  // Response value of every term on every instance, T x M.
  Eigen::MatrixXd response(static_cast<Eigen::Index>(num_terms()), M);
  for (std::size_t t = 0; t < num_terms(); ++t) {
    const auto block = x.segment(static_cast<Eigen::Index>(block_offset_[t]),
                                 static_cast<Eigen::Index>(term_slots_[t].size()));
    response.row(static_cast<Eigen::Index>(t)) = block.transpose() * term_features_[t];
  }
  Eigen::VectorXd e(row_weight_.size());
  for (Eigen::Index k = 0; k < M; ++k) {
    const auto begin = row_offset_[static_cast<std::size_t>(k)];
    const auto count = row_offset_[static_cast<std::size_t>(k) + 1] - begin;
    e.segment(begin, count).noalias() = row_signs_.middleRows(begin, count) * response.col(k);
  }
  return e;
}

double ScreeningObjective::instance_terms(std::size_t k, const Eigen::Ref<const Eigen::VectorXd>& e,
                                          Eigen::VectorXd* pull, Eigen::MatrixXd* curvature) const {
  const auto begin = row_offset_[k];
  const auto end = row_offset_[k + 1];
  // Largest exponent is factored out so exp() never overflows.
  double shift = -e(begin);
  for (auto r = begin + 1; r < end; ++r) shift = std::max(shift, -e(r));
  // Sequential sums: at E == 0 the numerator repeats the denominator's
  // additions exactly, so the instance contributes exactly one.
  double num = 0.0;
  if (pull != nullptr) pull->setZero(row_signs_.cols());
  if (curvature != nullptr) curvature->setZero(row_signs_.cols(), row_signs_.cols());
  for (auto r = begin; r < end; ++r) {
    const double we = row_weight_(r) * std::exp(-e(r) - shift);
    num += we;
    if (pull != nullptr) pull->noalias() += we * row_signs_.row(r).transpose();
    if (curvature != nullptr) curvature->noalias() += we * row_signs_.row(r).transpose() * row_signs_.row(r);
  }
  const double scale = std::exp(shift) / instance_total_(static_cast<Eigen::Index>(k));
  if (pull != nullptr) *pull *= scale;
  if (curvature != nullptr) *curvature *= scale;
  return (num / instance_total_(static_cast<Eigen::Index>(k))) * std::exp(shift);
}

double ScreeningObjective::value(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd e = energies(x);
  double loss = 0.0;
  for (std::size_t k = 0; k < num_instances(); ++k) {
    loss += instance_weight_(static_cast<Eigen::Index>(k)) * instance_terms(k, e, nullptr);
  }
  return loss / weight_sum_;
}

double ScreeningObjective::value_and_gradient(const Eigen::Ref<const Eigen::VectorXd>& x,
                                              Eigen::VectorXd& grad) const {
  const Eigen::VectorXd e = energies(x);
  const auto M = instance_weight_.size();
  const auto T = static_cast<Eigen::Index>(num_terms());
  // a_k sum_r w_r exp(-E_r) z_rt for every (t, k)
  Eigen::MatrixXd pull(T, M);
  Eigen::VectorXd col;
  double loss = 0.0;
  for (Eigen::Index k = 0; k < M; ++k) {
    const double a = instance_weight_(k) / weight_sum_;
    loss += instance_weight_(k) * instance_terms(static_cast<std::size_t>(k), e, &col);
    pull.col(k) = a * col;
  }
  grad.resize(static_cast<Eigen::Index>(num_free_));
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    grad.segment(static_cast<Eigen::Index>(block_offset_[ut]),
                 static_cast<Eigen::Index>(term_slots_[ut].size()))
        .noalias() = -term_features_[ut] * pull.row(t).transpose();
  }
  return loss / weight_sum_;
}

Eigen::VectorXd ScreeningObjective::instance_energies(std::size_t k,
                                                     const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (k >= num_instances()) throw std::out_of_range("interaction screening: instance out of range");
  if (static_cast<std::size_t>(x.size()) != num_free_) {
    throw std::invalid_argument("interaction screening: expected " + std::to_string(num_free_) +
                                " parameters, got " + std::to_string(x.size()));
  }
  const auto kk = static_cast<Eigen::Index>(k);
  const auto T = static_cast<Eigen::Index>(num_terms());
  Eigen::VectorXd response(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    response(t) = x.segment(static_cast<Eigen::Index>(block_offset_[ut]),
                            static_cast<Eigen::Index>(term_slots_[ut].size()))
                      .dot(term_features_[ut].col(kk));
  }
  const auto begin = row_offset_[k];
  const auto count = row_offset_[k + 1] - begin;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(row_weight_.size());
  e.segment(begin, count).noalias() = row_signs_.middleRows(begin, count) * response;
  return e;
}

double ScreeningObjective::instance_value_and_gradient(std::size_t k,
                                                       const Eigen::Ref<const Eigen::VectorXd>& x,
                                                       Eigen::VectorXd& grad) const {
  const Eigen::VectorXd e = instance_energies(k, x);
  Eigen::VectorXd pull;
  const double loss = instance_terms(k, e, &pull);
  const auto kk = static_cast<Eigen::Index>(k);
  grad.resize(static_cast<Eigen::Index>(num_free_));
  for (std::size_t t = 0; t < num_terms(); ++t) {
    grad.segment(static_cast<Eigen::Index>(block_offset_[t]), static_cast<Eigen::Index>(term_slots_[t].size())) =
        -pull(static_cast<Eigen::Index>(t)) * term_features_[t].col(kk);
  }
  return loss;
}

double ScreeningObjective::instance_response_derivatives(std::size_t k, const Eigen::Ref<const Eigen::VectorXd>& x,
                                                         Eigen::VectorXd& pull, Eigen::MatrixXd& curvature) const {
  return instance_terms(k, instance_energies(k, x), &pull, &curvature);
}

Eigen::MatrixXd ScreeningObjective::feature_moment(std::size_t term) const {
  const auto& phi = term_features_.at(term);
  return phi * (instance_weight_ / weight_sum_).asDiagonal() * phi.transpose();
}

double is_loss(std::size_t qubit, const Dataset& data, const LocalResponse& lambda,
               InstanceWeighting weighting) {
  if (lambda.qubit != qubit) throw std::invalid_argument("is_loss: local response belongs to another qubit");
  const ScreeningObjective objective(data, lambda, weighting);
  return objective.value(lambda.free_parameters());
}

Eigen::VectorXd is_loss_grad(std::size_t qubit, const Dataset& data, const LocalResponse& lambda,
                             InstanceWeighting weighting) {
  if (lambda.qubit != qubit) {
    throw std::invalid_argument("is_loss_grad: local response belongs to another qubit");
  }
  const ScreeningObjective objective(data, lambda, weighting);
  Eigen::VectorXd grad;
  objective.value_and_gradient(lambda.free_parameters(), grad);
  return grad;
}

}  // namespace isr
