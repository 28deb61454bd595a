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

#include "isr/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "isr/features.hpp"

namespace isr {

std::string to_string(Optimizer optimizer) {
  switch (optimizer) {
    case Optimizer::kGradientDescent: return "gd";
    case Optimizer::kEntropicDescent: return "entropic";
    case Optimizer::kOnlineSgd: return "online";
  }
  return "gd";
}

Optimizer parse_optimizer(const std::string& name) {
  if (name == "gd" || name == "gradient-descent-backtracking") return Optimizer::kGradientDescent;
  if (name == "entropic" || name == "entropic-descent") return Optimizer::kEntropicDescent;
  if (name == "online" || name == "online-sgd") return Optimizer::kOnlineSgd;
  throw std::invalid_argument("unknown optimizer '" + name + "'");
}

std::string to_string(OnlineStep step) { return step == OnlineStep::kNewton ? "newton" : "gradient"; }

OnlineStep parse_online_step(const std::string& name) {
  if (name == "gradient") return OnlineStep::kGradient;
  if (name == "newton") return OnlineStep::kNewton;
  throw std::invalid_argument("unknown online step '" + name + "'");
}

std::string to_string(StepSchedule schedule) {
  return schedule == StepSchedule::kPerPass ? "per-pass" : "per-update";
}

StepSchedule parse_step_schedule(const std::string& name) {
  if (name == "per-update") return StepSchedule::kPerUpdate;
  if (name == "per-pass") return StepSchedule::kPerPass;
  throw std::invalid_argument("unknown step schedule '" + name + "'");
}

void FitConfig::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("FitConfig: tolerance must be positive");
  if (!(l1 >= 0.0)) throw std::invalid_argument("FitConfig: l1 penalty must be nonnegative");
  if (!(step > 0.0)) throw std::invalid_argument("FitConfig: step must be positive");
  if (!(entropic_radius > 0.0)) throw std::invalid_argument("FitConfig: entropic radius must be positive");
}

bool FitReport::converged() const {
  return std::all_of(qubits.begin(), qubits.end(), [](const auto& q) { return q.converged; });
}

double FitReport::max_grad_inf_norm() const {
  double m = 0.0;
  for (const auto& q : qubits) m = std::max(m, q.grad_inf_norm);
  return m;
}

// ---------------------------------------------------------------------------
// Preconditioner

namespace {

constexpr double kRelativeEigenCutoff = 1e-12;

std::vector<std::size_t> block_offsets(const ScreeningObjective& objective) {
  std::vector<std::size_t> offsets;
  for (std::size_t t = 0; t < objective.num_terms(); ++t) offsets.push_back(objective.block_offset(t));
  return offsets;
}

Eigen::MatrixXd pseudo_inverse_psd(const Eigen::MatrixXd& moment) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(moment);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double cutoff = kRelativeEigenCutoff * std::max(values.maxCoeff(), 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(values.size());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values(k) > cutoff && values(k) > 0.0) inv(k) = 1.0 / values(k);
  }
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

Preconditioner Preconditioner::whitening(const ScreeningObjective& objective) {
  Preconditioner p;
  p.offsets_ = block_offsets(objective);
  for (std::size_t t = 0; t < objective.num_terms(); ++t) {
    p.blocks_.push_back(pseudo_inverse_psd(objective.feature_moment(t)));
  }
  return p;
}

Preconditioner Preconditioner::diagonal(const ScreeningObjective& objective) {
  Preconditioner p;
  p.offsets_ = block_offsets(objective);
  for (std::size_t t = 0; t < objective.num_terms(); ++t) {
    const Eigen::VectorXd d = objective.feature_moment(t).diagonal();
    p.blocks_.push_back(
        d.unaryExpr([](double v) { return v > 0.0 ? 1.0 / v : 0.0; }).asDiagonal().toDenseMatrix());
  }
  return p;
}

Preconditioner Preconditioner::from_blocks(std::vector<std::size_t> offsets, std::vector<Eigen::MatrixXd> blocks) {
  if (offsets.size() != blocks.size()) throw std::invalid_argument("Preconditioner: offsets and blocks differ in count");
  for (const auto& b : blocks) {
    if (b.rows() != b.cols()) throw std::invalid_argument("Preconditioner: blocks must be square");
  }
  Preconditioner p;
  p.offsets_ = std::move(offsets);
  p.blocks_ = std::move(blocks);
  return p;
}

Eigen::VectorXd Preconditioner::apply(const Eigen::Ref<const Eigen::VectorXd>& grad) const {
  if (blocks_.empty()) return grad;
  Eigen::VectorXd out(grad.size());
  for (std::size_t t = 0; t < blocks_.size(); ++t) {
    const auto offset = static_cast<Eigen::Index>(offsets_[t]);
    const auto size = blocks_[t].rows();
    if (offset + size > grad.size()) throw std::invalid_argument("Preconditioner: gradient too short");
    out.segment(offset, size).noalias() = blocks_[t] * grad.segment(offset, size);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Batch optimizers

namespace {

double soft_threshold(double v, double threshold) {
  if (v > threshold) return v - threshold;
  if (v < -threshold) return v + threshold;
  return 0.0;
}

/// Minimal-norm subgradient of loss + l1 * ||x||_1.
double optimality_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& grad, double l1) {
  if (l1 == 0.0) return grad.size() == 0 ? 0.0 : grad.lpNorm<Eigen::Infinity>();
  double r = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double v = x(j) != 0.0 ? std::abs(grad(j) + l1 * (x(j) > 0 ? 1.0 : -1.0))
                                 : std::max(std::abs(grad(j)) - l1, 0.0);
    r = std::max(r, v);
  }
  return r;
}

struct OptimizerResult {
  Eigen::VectorXd x;
  double loss = 0.0;  // smooth part plus penalty
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

double penalized(const ScreeningObjective& f, const Eigen::VectorXd& x, double l1) {
  return f.value(x) + l1 * x.lpNorm<1>();
}

constexpr double kArmijo = 1e-4;
constexpr double kMaxStep = 1e12;
constexpr int kMaxBacktracks = 80;

OptimizerResult gradient_descent(const ScreeningObjective& f, const FitConfig& config) {
  OptimizerResult out;
  out.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(f.num_free()));
  Preconditioner precond;
  if (config.precondition) {
    precond = config.l1 > 0.0 ? Preconditioner::diagonal(f) : Preconditioner::whitening(f);
  }
  Eigen::VectorXd grad;
  double smooth = f.value_and_gradient(out.x, grad);
  double step = config.step;
  out.loss = smooth + config.l1 * out.x.lpNorm<1>();
  if (config.record_trace) out.trace.push_back(out.loss);

  for (out.iterations = 0; out.iterations < config.max_iterations; ++out.iterations) {
    out.residual = optimality_residual(out.x, grad, config.l1);
    if (out.residual <= config.tolerance) {
      out.converged = true;
      break;
    }
    const Eigen::VectorXd direction = precond.apply(grad);
    Eigen::VectorXd candidate;
    double candidate_smooth = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      if (config.l1 == 0.0) {
        candidate = out.x - step * direction;
        candidate_smooth = f.value(candidate);
        if (candidate_smooth <= smooth - kArmijo * step * grad.dot(direction)) accepted = true;
      } else {
        // Proximal step in the metric of the (diagonal) preconditioner.
        candidate = out.x - step * direction;
        const Eigen::VectorXd scale = precond.apply(Eigen::VectorXd::Ones(out.x.size()));
        for (Eigen::Index j = 0; j < candidate.size(); ++j) {
          candidate(j) = soft_threshold(candidate(j), step * config.l1 * scale(j));
        }
        candidate_smooth = f.value(candidate);
        const Eigen::VectorXd delta = candidate - out.x;
        double quad = 0.0;
        for (Eigen::Index j = 0; j < delta.size(); ++j) {
          if (scale(j) > 0.0) quad += delta(j) * delta(j) / scale(j);
        }
        if (candidate_smooth <= smooth + grad.dot(delta) + quad / (2.0 * step)) accepted = true;
      }
      if (accepted) break;
      step *= 0.5;
    }
    if (!accepted || !std::isfinite(candidate_smooth)) break;  // stalled at machine precision
    out.x = std::move(candidate);
    smooth = f.value_and_gradient(out.x, grad);
    out.loss = smooth + config.l1 * out.x.lpNorm<1>();
    if (config.record_trace) out.trace.push_back(out.loss);
    step = std::min(step * 2.0, kMaxStep);
  }
  out.residual = optimality_residual(out.x, grad, config.l1);
  out.converged = out.residual <= config.tolerance;
  return out;
}

/// Symmetric factor B with B B^T equal to the preconditioner, used as the
/// coordinate change x = B v for mirror descent.
Eigen::MatrixXd coordinate_factor(const ScreeningObjective& f, const FitConfig& config) {
  const auto q = static_cast<Eigen::Index>(f.num_free());
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(q, q);
  if (!config.precondition) return B;
  for (std::size_t t = 0; t < f.num_terms(); ++t) {
    const auto offset = static_cast<Eigen::Index>(f.block_offset(t));
    const auto size = static_cast<Eigen::Index>(f.block_size(t));
    const Eigen::MatrixXd moment = f.feature_moment(t);
    if (config.l1 > 0.0) {
      const Eigen::VectorXd d = moment.diagonal().unaryExpr(
          [](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 0.0; });
      B.block(offset, offset, size, size) = d.asDiagonal();
    } else {
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(moment);
      const Eigen::VectorXd& values = eig.eigenvalues();
      const double cutoff = kRelativeEigenCutoff * std::max(values.maxCoeff(), 0.0);
      const Eigen::VectorXd inv_sqrt = values.unaryExpr(
          [cutoff](double v) { return v > cutoff && v > 0.0 ? 1.0 / std::sqrt(v) : 0.0; });
      B.block(offset, offset, size, size) =
          eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
    }
  }
  return B;
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

/// Exponentiated-gradient mirror descent over
/// { v = R (p+ - p-) : (p+, p-, slack) in the probability simplex }.
/// With l1 > 0 the coordinate change is diagonal, so the penalty is linear in
/// p and handled exactly.
OptimizerResult entropic_descent(const ScreeningObjective& f, const FitConfig& config) {
  OptimizerResult out;
  const auto q = static_cast<Eigen::Index>(f.num_free());
  const double R = config.entropic_radius;
  const Eigen::MatrixXd B = coordinate_factor(f, config);
  const Eigen::VectorXd penalty_weight = B.diagonal().cwiseAbs() * config.l1;

  Eigen::VectorXd logp = Eigen::VectorXd::Constant(2 * q + 1, -std::log(2.0 * static_cast<double>(q) + 1.0));
  auto objective = [&](const Eigen::VectorXd& lp, Eigen::VectorXd* grad_p, Eigen::VectorXd* grad_x,
                       Eigen::VectorXd* x_out) {
    const Eigen::VectorXd p = lp.array().exp().matrix();
    const Eigen::VectorXd x = B * (R * (p.head(q) - p.segment(q, q)));
    double value;
    Eigen::VectorXd gx;
    if (grad_p != nullptr || grad_x != nullptr) {
      value = f.value_and_gradient(x, gx);
    } else {
      value = f.value(x);
    }
    value += R * penalty_weight.dot(p.head(q) + p.segment(q, q));
    if (grad_p != nullptr) {
      const Eigen::VectorXd gv = R * (B.transpose() * gx);
      grad_p->resize(2 * q + 1);
      grad_p->head(q) = gv + R * penalty_weight;
      grad_p->segment(q, q) = -gv + R * penalty_weight;
      (*grad_p)(2 * q) = 0.0;
    }
    if (grad_x != nullptr) *grad_x = gx;
    if (x_out != nullptr) *x_out = x;
    return value;
  };

  Eigen::VectorXd grad_p;
  Eigen::VectorXd grad_x;
  double value = objective(logp, &grad_p, &grad_x, &out.x);
  double step = config.step / (R * R);
  if (config.record_trace) out.trace.push_back(value);

  for (out.iterations = 0; out.iterations < config.max_iterations; ++out.iterations) {
    out.residual = optimality_residual(out.x, grad_x, config.l1);
    if (out.residual <= config.tolerance) break;
    bool accepted = false;
    Eigen::VectorXd candidate;
    double candidate_value = 0.0;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      candidate = logp - step * grad_p;
      candidate.array() -= log_sum_exp(candidate);
      candidate_value = objective(candidate, nullptr, nullptr, nullptr);
      const Eigen::VectorXd p_new = candidate.array().exp().matrix();
      const Eigen::VectorXd p_old = logp.array().exp().matrix();
      const double kl = p_new.dot(candidate - logp);
      if (std::isfinite(candidate_value) &&
          candidate_value <= value + grad_p.dot(p_new - p_old) + kl / step) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    logp = std::move(candidate);
    value = objective(logp, &grad_p, &grad_x, &out.x);
    if (config.record_trace) out.trace.push_back(value);
    step = std::min(step * 2.0, kMaxStep);
  }
  out.loss = f.value(out.x) + config.l1 * out.x.lpNorm<1>();
  out.residual = optimality_residual(out.x, grad_x, config.l1);
  out.converged = out.residual <= config.tolerance;
  return out;
}

/// Newton direction for instance k: with z_t the term features and P_t the
/// metric blocks, the step is sum_t lambda_t P_t z_t where
/// curvature * diag(z_t' P_t z_t) * lambda = pull.
Eigen::VectorXd instance_newton_direction(const ScreeningObjective& f, std::size_t k, const Eigen::VectorXd& x,
                                          const Preconditioner& metric) {
  Eigen::VectorXd pull;
  Eigen::MatrixXd curvature;
  f.instance_response_derivatives(k, x, pull, curvature);
  const auto T = static_cast<Eigen::Index>(f.num_terms());
  std::vector<Eigen::VectorXd> pz(static_cast<std::size_t>(T));
  Eigen::VectorXd q(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const Eigen::VectorXd z = f.instance_features(ut, k);
    pz[ut] = metric.empty() ? z : Eigen::VectorXd(metric.block(ut) * z);
    q(t) = z.dot(pz[ut]);
  }
  const Eigen::MatrixXd system = curvature * q.asDiagonal();
  const Eigen::VectorXd lambda = system.completeOrthogonalDecomposition().solve(pull);
  Eigen::VectorXd direction = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    direction.segment(static_cast<Eigen::Index>(f.block_offset(ut)), pz[ut].size()) = lambda(t) * pz[ut];
  }
  return direction;
}

/// One single-instance update of x in place.
void online_step(const ScreeningObjective& f, std::size_t k, Eigen::VectorXd& x, double eta,
                 const Preconditioner& precond, double l1, OnlineStep kind) {
  if (kind == OnlineStep::kNewton) {
    x += eta * instance_newton_direction(f, k, x, precond);
  } else {
    Eigen::VectorXd grad;
    f.instance_value_and_gradient(k, x, grad);
    x -= eta * precond.apply(grad);
  }
  if (l1 > 0.0) {
    const Eigen::VectorXd scale = precond.apply(Eigen::VectorXd::Ones(x.size()));
    for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = soft_threshold(x(j), eta * l1 * scale(j));
  }
}

OptimizerResult online_descent(const ScreeningObjective& f, const FitConfig& config) {
  OptimizerResult out;
  out.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(f.num_free()));
  Preconditioner precond;
  if (config.precondition) {
    precond = config.l1 > 0.0 ? Preconditioner::diagonal(f) : Preconditioner::whitening(f);
  }
  std::size_t t = 0;
  if (config.record_trace) out.trace.push_back(penalized(f, out.x, config.l1));
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t k = 0; k < f.num_instances(); ++k) {
      ++t;
      const double clock = config.schedule == StepSchedule::kPerPass ? static_cast<double>(epoch + 1)
                                                                     : static_cast<double>(t);
      online_step(f, k, out.x, config.step / std::sqrt(clock), precond, config.l1, config.online_step);
    }
    if (config.record_trace) out.trace.push_back(penalized(f, out.x, config.l1));
  }
  out.iterations = t;
  Eigen::VectorXd grad;
  out.loss = f.value_and_gradient(out.x, grad) + config.l1 * out.x.lpNorm<1>();
  out.residual = optimality_residual(out.x, grad, config.l1);
  out.converged = out.residual <= config.tolerance;
  return out;
}

std::vector<TermId> resolve_terms(const Topology& topology, const FitConfig& config) {
  std::vector<TermId> terms = config.output_terms.empty() ? topology.all_output_terms() : config.output_terms;
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  for (const auto& term : terms) {
    if (term.i >= topology.num_qubits() || term.j >= topology.num_qubits()) {
      throw std::invalid_argument("output term " + term.label() + " out of range");
    }
  }
  return terms;
}

std::size_t numerical_rank(Eigen::MatrixXd features) {
  if (features.size() == 0) return 0;
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    const double norm = features.col(c).norm();
    if (norm > 0.0) features.col(c) /= norm;
  }
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(features);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = 1e-10 * (s.size() > 0 ? s(0) : 0.0);
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) rank += s(k) > cutoff ? 1 : 0;
  return rank;
}

/// Rank of the instance features over the union of the local slots' masks.
std::pair<std::size_t, std::size_t> local_rank(const Dataset& data, const LocalResponse& local) {
  const std::size_t dim = data.topology().dimension();
  Eigen::Array<bool, Eigen::Dynamic, 1> used =
      Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(static_cast<Eigen::Index>(feature_count(dim)), false);
  for (const auto& p : local.params) used = used || feature_mask(p);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index s = 0; s < used.size(); ++s) {
    if (used(s)) cols.push_back(s);
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < data.size(); ++k) {
    const Eigen::VectorXd phi = monomial_features(data.instance(k).theta);
    rows.row(static_cast<Eigen::Index>(k)) = phi(cols).transpose();
  }
  return {numerical_rank(rows), cols.size()};
}

}  // namespace

std::pair<LocalResponse, QubitFitReport> fit_qubit_response(std::size_t qubit, const Dataset& data,
                                                             const FitConfig& config) {
  config.validate();
  if (data.empty()) throw std::invalid_argument("fit_qubit_response: empty dataset");
  const auto terms = resolve_terms(data.topology(), config);
  LocalResponse local = LocalResponse::zeros(qubit, data.topology(), config.mask, terms);
  const ScreeningObjective objective(data, local, config.weighting);

  QubitFitReport report;
  report.qubit = qubit;
  std::tie(report.rank, report.required) = local_rank(data, local);
  report.initial_loss = objective.value(local.free_parameters());

  OptimizerResult result;
  switch (config.optimizer) {
    case Optimizer::kGradientDescent: result = gradient_descent(objective, config); break;
    case Optimizer::kEntropicDescent: result = entropic_descent(objective, config); break;
    case Optimizer::kOnlineSgd: result = online_descent(objective, config); break;
  }
  local.set_free_parameters(result.x);
  report.final_loss = result.loss;
  report.grad_inf_norm = result.residual;
  report.iterations = result.iterations;
  report.converged = result.converged;
  report.loss_trace = std::move(result.trace);
  return {std::move(local), std::move(report)};
}

namespace {

std::string format_residual(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Averages the two estimates of every pair term. Returns the largest
/// pre-average disagreement.
double reconcile(const std::vector<LocalResponse>& local, const std::vector<TermId>& terms,
                 std::map<TermId, ResponseTermParams>& out) {
  double discrepancy = 0.0;
  auto find = [&](std::size_t q, const TermId& term) -> const ResponseTermParams& {
    const auto& l = local[q];
    const auto it = std::find(l.terms.begin(), l.terms.end(), term);
    return l.params[static_cast<std::size_t>(it - l.terms.begin())];
  };
  for (const auto& term : terms) {
    if (term.is_single()) {
      out.emplace(term, find(term.i, term));
      continue;
    }
    const auto& a = find(term.i, term);
    const auto& b = find(term.j, term);
    const Eigen::VectorXd wa = to_feature_coefficients(a);
    const Eigen::VectorXd wb = to_feature_coefficients(b);
    discrepancy = std::max(discrepancy, (wa - wb).lpNorm<Eigen::Infinity>());
    out.emplace(term, from_feature_coefficients(0.5 * (wa + wb), feature_mask(a), a.dimension()));
  }
  return discrepancy;
}

}  // namespace

std::pair<ResponseModel, FitReport> fit_response(const Dataset& data, const FitConfig& config) {
  config.validate();
  if (data.empty()) throw std::invalid_argument("fit_response: empty dataset");
  const auto terms = resolve_terms(data.topology(), config);
  FitConfig resolved = config;
  resolved.output_terms = terms;

  const std::size_t n = data.topology().num_qubits();
  std::vector<LocalResponse> local(n);
  FitReport report;
  report.qubits.resize(n);
  parallel_for(n, config.threads, [&](std::size_t q) {
    auto [lambda, qreport] = fit_qubit_response(q, data, resolved);
    local[q] = std::move(lambda);
    report.qubits[q] = std::move(qreport);
  });

  for (const auto& q : report.qubits) {
    if (q.rank < q.required) {
      report.warnings.push_back("qubit " + std::to_string(q.qubit) + ": instance feature rank " +
                                std::to_string(q.rank) + " < " + std::to_string(q.required) +
                                " required; the minimizer is not unique");
    }
    if (!q.converged) {
      report.warnings.push_back("qubit " + std::to_string(q.qubit) + ": not converged after " +
                                std::to_string(q.iterations) + " iterations (residual " +
                                format_residual(q.grad_inf_norm) + ")");
    }
  }

  std::map<TermId, ResponseTermParams> params;
  report.reconciliation_discrepancy = reconcile(local, terms, params);
  return {ResponseModel(data.topology(), config.mask, std::move(params)), std::move(report)};
}

std::pair<OutputHamiltonian, FitReport> rise_fit_with_report(const SampleSet& samples,
                                                             const std::vector<TermId>& output_terms,
                                                             const FitConfig& config) {
  const std::size_t n = samples.num_qubits();
  const Topology topology = Topology::empty(n);
  Dataset data(topology);
  data.add(InputInstance(topology, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))), samples);
  FitConfig constants = config;
  constants.mask = MaskPreset::kConstant;
  constants.output_terms = output_terms;
  auto [model, report] = fit_response(data, constants);
  OutputHamiltonian ham(n);
  for (const auto& [term, params] : model.terms()) ham.set(term, params.c);
  return {std::move(ham), std::move(report)};
}

OutputHamiltonian rise_fit(const SampleSet& samples, const std::vector<TermId>& output_terms,
                           const FitConfig& config) {
  return rise_fit_with_report(samples, output_terms, config).first;
}

// ---------------------------------------------------------------------------
// Online updates

LocalResponse online_update(const LocalResponse& lambda, const InputInstance& instance,
                            const SampleSet& samples, double step, const Preconditioner* preconditioner,
                            double l1, OnlineStep kind) {
  if (!(step >= 0.0)) throw std::invalid_argument("online_update: step must be nonnegative");
  if (lambda.dimension() != instance.dimension()) {
    throw std::invalid_argument("online_update: response dimension " + std::to_string(lambda.dimension()) +
                                " does not match instance dimension " + std::to_string(instance.dimension()));
  }
  if (step == 0.0) return lambda;
  Dataset single(instance.topology);
  single.add(instance, samples);
  const ScreeningObjective objective(single, lambda);
  Eigen::VectorXd x = lambda.free_parameters();
  online_step(objective, 0, x, step, preconditioner != nullptr ? *preconditioner : Preconditioner(), l1, kind);
  LocalResponse next = lambda;
  next.set_free_parameters(x);
  return next;
}

OnlineLearner::OnlineLearner(Topology topology, FitConfig config)
    : topology_(std::move(topology)), config_(std::move(config)) {
  config_.validate();
  terms_ = resolve_terms(topology_, config_);
  for (std::size_t q = 0; q < topology_.num_qubits(); ++q) {
    local_.push_back(LocalResponse::zeros(q, topology_, config_.mask, terms_));
  }
  const auto size = static_cast<Eigen::Index>(feature_count(topology_.dimension()));
  moment_ = Eigen::MatrixXd::Zero(size, size);
}

void OnlineLearner::observe(const InputInstance& instance, const SampleSet& samples) {
  if (!(instance.topology == topology_)) throw std::invalid_argument("OnlineLearner: topology mismatch");
  const Eigen::VectorXd phi = quadratic_features(instance.theta);
  moment_.noalias() += phi * phi.transpose();
  ++steps_;
  const double eta = config_.step / std::sqrt(static_cast<double>(steps_));
  const double inv_steps = 1.0 / static_cast<double>(steps_);

  // Running moment with a ridge that fades as inputs accumulate; terms with
  // the same free slots share one inverse.
  std::map<std::vector<Eigen::Index>, Eigen::MatrixXd> inverses;
  auto metric_block = [&](const std::vector<Eigen::Index>& slots) -> const Eigen::MatrixXd& {
    auto it = inverses.find(slots);
    if (it == inverses.end()) {
      const auto n = static_cast<Eigen::Index>(slots.size());
      const Eigen::MatrixXd regularized =
          moment_(slots, slots) * inv_steps + Eigen::MatrixXd::Identity(n, n) * inv_steps;
      it = inverses.emplace(slots, regularized.ldlt().solve(Eigen::MatrixXd::Identity(n, n))).first;
    }
    return it->second;
  };

  Dataset single(topology_);
  single.add(instance, samples);
  for (auto& lambda : local_) {
    const ScreeningObjective objective(single, lambda);
    Preconditioner precond;
    if (config_.precondition) {
      std::vector<std::size_t> offsets;
      std::vector<Eigen::MatrixXd> blocks;
      for (std::size_t t = 0; t < lambda.terms.size(); ++t) {
        const auto mask = feature_mask(lambda.params[t]);
        std::vector<Eigen::Index> slots;
        for (Eigen::Index s = 0; s < mask.size(); ++s) {
          if (mask(s)) slots.push_back(s);
        }
        offsets.push_back(objective.block_offset(t));
        blocks.push_back(metric_block(slots));
      }
      precond = Preconditioner::from_blocks(std::move(offsets), std::move(blocks));
    }
    Eigen::VectorXd x = lambda.free_parameters();
    online_step(objective, 0, x, eta, precond, config_.l1, config_.online_step);
    lambda.set_free_parameters(x);
  }
}

ResponseModel OnlineLearner::model() const {
  std::map<TermId, ResponseTermParams> params;
  reconcile(local_, terms_, params);
  return ResponseModel(topology_, config_.mask, std::move(params));
}

// ---------------------------------------------------------------------------

IdentifiabilityReport identifiability_check(const std::vector<InputInstance>& instances, MaskPreset preset) {
  IdentifiabilityReport report;
  if (instances.empty()) throw std::invalid_argument("identifiability_check: empty instance list");
  const std::size_t dim = instances.front().dimension();
  switch (preset) {
    case MaskPreset::kFull:
    case MaskPreset::kPhysical: report.required = feature_count(dim); break;
    case MaskPreset::kLinear: report.required = dim + 1; break;
    case MaskPreset::kConstant: report.required = 1; break;
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(instances.size()), static_cast<Eigen::Index>(report.required));
  for (std::size_t k = 0; k < instances.size(); ++k) {
    if (instances[k].dimension() != dim) {
      throw std::invalid_argument("identifiability_check: instances have different dimensions");
    }
    rows.row(static_cast<Eigen::Index>(k)) =
        monomial_features(instances[k].theta).head(static_cast<Eigen::Index>(report.required)).transpose();
  }
  report.rank = numerical_rank(std::move(rows));
  report.sufficient = report.rank == report.required;
  return report;
}

}  // namespace isr
