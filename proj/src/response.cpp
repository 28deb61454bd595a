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

#include "isr/response.hpp"

#include <algorithm>

namespace isr {

std::string to_string(MaskPreset preset) {
  switch (preset) {
    case MaskPreset::kFull: return "full";
    case MaskPreset::kPhysical: return "physical";
    case MaskPreset::kLinear: return "linear";
    case MaskPreset::kConstant: return "constant";
  }
  return "physical";
}

MaskPreset parse_mask_preset(const std::string& name) {
  if (name == "full") return MaskPreset::kFull;
  if (name == "physical") return MaskPreset::kPhysical;
  if (name == "linear") return MaskPreset::kLinear;
  if (name == "constant") return MaskPreset::kConstant;
  throw std::invalid_argument("unknown mask preset '" + name + "'");
}

Eigen::VectorXd to_feature_coefficients(const ResponseTermParams& params) {
  const std::size_t dim = params.dimension();
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::VectorXd w(static_cast<Eigen::Index>(feature_count(dim)));
  w(0) = params.c;
  w.segment(1, d) = params.beta;
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      w(static_cast<Eigen::Index>(quadratic_slot(dim, a, b))) =
          params.chi(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  return w;
}

Eigen::Array<bool, Eigen::Dynamic, 1> feature_mask(const ResponseTermParams& params) {
  const std::size_t dim = params.dimension();
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::Array<bool, Eigen::Dynamic, 1> mask(static_cast<Eigen::Index>(feature_count(dim)));
  mask(0) = true;
  mask.segment(1, d) = params.beta_free;
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      mask(static_cast<Eigen::Index>(quadratic_slot(dim, a, b))) =
          params.chi_free(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  return mask;
}

ResponseTermParams from_feature_coefficients(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                                             const Eigen::Array<bool, Eigen::Dynamic, 1>& mask,
                                             std::size_t dim) {
  const auto size = static_cast<Eigen::Index>(feature_count(dim));
  if (coeffs.size() != size || mask.size() != size) {
    throw std::invalid_argument("from_feature_coefficients: expected " + std::to_string(size) +
                                " coefficients");
  }
  const auto d = static_cast<Eigen::Index>(dim);
  ResponseTermParams p = ResponseTermParams::zeros(dim, false, false);
  p.c = coeffs(0);
  p.beta = coeffs.segment(1, d);
  p.beta_free = mask.segment(1, d);
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      const auto slot = static_cast<Eigen::Index>(quadratic_slot(dim, a, b));
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      p.chi(ia, ib) = p.chi(ib, ia) = coeffs(slot);
      p.chi_free(ia, ib) = p.chi_free(ib, ia) = mask(slot);
    }
  }
  p.enforce_mask();
  return p;
}

ResponseTermParams masked_zeros(const TermId& term, const Topology& topology, MaskPreset preset) {
  const std::size_t dim = topology.dimension();
  switch (preset) {
    case MaskPreset::kFull:
      return ResponseTermParams::zeros(dim, true, true);
    case MaskPreset::kPhysical: {
      // Non-physical output couplings respond only linearly.
      const bool physical = term.is_single() || topology.has_edge(term.i, term.j);
      return ResponseTermParams::zeros(dim, true, physical);
    }
    case MaskPreset::kLinear:
      return ResponseTermParams::zeros(dim, true, false);
    case MaskPreset::kConstant:
      return ResponseTermParams::zeros(dim, false, false);
  }
  throw std::invalid_argument("masked_zeros: unknown preset");
}

ResponseModel::ResponseModel(Topology topology, MaskPreset preset,
                             std::map<TermId, ResponseTermParams> terms)
    : topology_(std::move(topology)), preset_(preset), terms_(std::move(terms)) {
  const std::size_t n = topology_.num_qubits();
  const std::size_t dim = topology_.dimension();
  for (auto& [term, params] : terms_) {
    if (term.i >= n || term.j >= n) {
      throw std::invalid_argument("ResponseModel: term " + term.label() + " out of range");
    }
    if (params.dimension() != dim || static_cast<std::size_t>(params.chi.rows()) != dim ||
        static_cast<std::size_t>(params.chi.cols()) != dim ||
        static_cast<std::size_t>(params.beta_free.size()) != dim ||
        static_cast<std::size_t>(params.chi_free.rows()) != dim ||
        static_cast<std::size_t>(params.chi_free.cols()) != dim) {
      throw std::invalid_argument("ResponseModel: parameters of " + term.label() +
                                  " do not match dimension " + std::to_string(dim));
    }
    params.enforce_mask();
  }
}

ResponseModel ResponseModel::zeros(const Topology& topology, MaskPreset preset,
                                   std::vector<TermId> terms) {
  if (terms.empty()) terms = topology.all_output_terms();
  std::map<TermId, ResponseTermParams> params;
  for (const auto& term : terms) params.emplace(term, masked_zeros(term, topology, preset));
  return ResponseModel(topology, preset, std::move(params));
}

ResponseModel ResponseModel::identity(const Topology& topology, MaskPreset preset, double scale,
                                      std::vector<TermId> terms) {
  ResponseModel model = zeros(topology, preset, std::move(terms));
  const auto index = canonical_index(topology);
  for (auto& [term, params] : model.terms_) {
    const auto it = index.find(term);
    if (it == index.end()) continue;
    const auto slot = static_cast<Eigen::Index>(it->second);
    if (!params.beta_free(slot)) continue;
    params.beta(slot) = scale;
  }
  return model;
}

std::vector<TermId> ResponseModel::term_ids() const {
  std::vector<TermId> ids;
  ids.reserve(terms_.size());
  for (const auto& [term, params] : terms_) ids.push_back(term);
  return ids;
}

const ResponseTermParams& ResponseModel::at(const TermId& term) const {
  const auto it = terms_.find(term);
  if (it == terms_.end()) throw std::out_of_range("ResponseModel: term " + term.label() + " is not modeled");
  return it->second;
}

void ResponseModel::set(const TermId& term, ResponseTermParams params) {
  if (params.dimension() != dimension()) {
    throw std::invalid_argument("ResponseModel::set: dimension mismatch for " + term.label());
  }
  if (term.i >= num_qubits() || term.j >= num_qubits()) {
    throw std::invalid_argument("ResponseModel::set: term " + term.label() + " out of range");
  }
  params.enforce_mask();
  terms_[term] = std::move(params);
}

std::vector<TermId> ResponseModel::terms_touching(std::size_t q) const {
  std::vector<TermId> ids;
  for (const auto& [term, params] : terms_) {
    if (term.touches(q)) ids.push_back(term);
  }
  return ids;
}

std::size_t ResponseModel::num_free() const {
  std::size_t count = 0;
  for (const auto& [term, params] : terms_) count += params.num_free();
  return count;
}

bool ResponseModel::operator==(const ResponseModel& other) const {
  return topology_ == other.topology_ && preset_ == other.preset_ && terms_ == other.terms_;
}

namespace {

void check_instance(const InputInstance& instance, const ResponseModel& model) {
  if (!(instance.topology == model.topology())) {
    throw std::invalid_argument("instance topology does not match the response model");
  }
  if (instance.dimension() != model.dimension()) {
    throw std::invalid_argument("instance has dimension " + std::to_string(instance.dimension()) +
                                ", model expects " + std::to_string(model.dimension()));
  }
}

}  // namespace

OutputHamiltonian predict_output(const InputInstance& instance, const ResponseModel& model) {
  check_instance(instance, model);
  OutputHamiltonian ham(model.num_qubits());
  for (const auto& [term, params] : model.terms()) ham.set(term, response_eval(instance.theta, params));
  return ham;
}

double local_energy(std::size_t qubit, const Eigen::Ref<const Eigen::VectorXi>& sigma,
                    const InputInstance& instance, const ResponseModel& model) {
  check_instance(instance, model);
  if (qubit >= model.num_qubits()) throw std::invalid_argument("local_energy: qubit out of range");
  if (static_cast<std::size_t>(sigma.size()) != model.num_qubits()) {
    throw std::invalid_argument("local_energy: configuration length mismatch");
  }
  double inner = 0.0;
  for (const auto& [term, params] : model.terms()) {
    if (!term.touches(qubit)) continue;
    const double f = response_eval(instance.theta, params);
    inner += term.is_pair() ? sigma(static_cast<Eigen::Index>(term.other(qubit))) * f : f;
  }
  return sigma(static_cast<Eigen::Index>(qubit)) * inner;
}

}  // namespace isr
