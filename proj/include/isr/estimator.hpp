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

#ifndef ISR_ESTIMATOR_HPP_
#define ISR_ESTIMATOR_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "isr/dataset.hpp"
#include "isr/hamiltonian.hpp"
#include "isr/response.hpp"
#include "isr/screening.hpp"

namespace isr {

enum class Optimizer {
  kGradientDescent,  // full batch, Armijo backtracking
  kEntropicDescent,  // mirror descent on a scaled l1 ball
  kOnlineSgd,        // cycles through instances with eta0 / sqrt(t)
};

std::string to_string(Optimizer optimizer);
/// Accepts "gd", "entropic", "online".
Optimizer parse_optimizer(const std::string& name);

/// Direction of a single-instance update.
enum class OnlineStep {
  kGradient,  // preconditioned gradient
  kNewton,    // minimizer of the instance's quadratic model, least-norm in the preconditioner metric
};

/// What t counts in eta_t = eta0 / sqrt(t) when a fixed dataset is replayed.
enum class StepSchedule {
  kPerUpdate,  // every single-instance update
  kPerPass,    // every pass over the dataset
};

std::string to_string(OnlineStep step);
/// Accepts "gradient", "newton".
OnlineStep parse_online_step(const std::string& name);
std::string to_string(StepSchedule schedule);
/// Accepts "per-update", "per-pass".
StepSchedule parse_step_schedule(const std::string& name);

struct FitConfig {
  Optimizer optimizer = Optimizer::kGradientDescent;
  MaskPreset mask = MaskPreset::kPhysical;
  InstanceWeighting weighting = InstanceWeighting::kUniform;
  /// Stop when the inf-norm of the gradient (or, with l1 > 0, of the minimal
  /// subgradient) falls below this.
  double tolerance = 1e-6;
  std::size_t max_iterations = 10000;
  /// Penalty lambda * ||Lambda||_1 on every free coefficient.
  double l1 = 0.0;
  /// Initial step for the batch optimizers; eta0 for online-sgd.
  double step = 1.0;
  /// Passes over the data for online-sgd.
  std::size_t epochs = 50;
  OnlineStep online_step = OnlineStep::kNewton;
  StepSchedule schedule = StepSchedule::kPerPass;
  /// l1 radius of the entropic-descent feasible set, in optimizer
  /// coordinates.
  double entropic_radius = 1000.0;
  /// Whiten each term's features by the instance second moment (l1 == 0) or
  /// rescale them to unit second moment (l1 > 0).
  bool precondition = true;
  /// Modeled output terms; empty means every pair and every single.
  std::vector<TermId> output_terms;
  /// Worker threads for per-qubit fits; 0 picks the hardware concurrency.
  std::size_t threads = 0;
  bool record_trace = true;

  /// Throws std::invalid_argument when a numeric setting is out of range.
  void validate() const;
};

struct QubitFitReport {
  std::size_t qubit = 0;
  double initial_loss = 1.0;
  double final_loss = 1.0;
  double grad_inf_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> loss_trace;
  /// Numerical rank of the instance feature matrix under this qubit's mask.
  std::size_t rank = 0;
  std::size_t required = 0;
};

struct FitReport {
  std::vector<QubitFitReport> qubits;
  /// max |Lambda^(i)_ij - Lambda^(j)_ij| over shared pair coefficients before
  /// averaging.
  double reconciliation_discrepancy = 0.0;
  std::vector<std::string> warnings;

  bool converged() const;
  double max_grad_inf_norm() const;
};

/// Minimizes the interaction-screening loss of one qubit starting from zero.
/// Non-convergence is reported, not thrown; the partial result is returned.
std::pair<LocalResponse, QubitFitReport> fit_qubit_response(std::size_t qubit, const Dataset& data,
                                                             const FitConfig& config);

/// Fits every qubit (concurrently), then averages the two estimates of each
/// pair term. Throws std::invalid_argument on an empty dataset.
std::pair<ResponseModel, FitReport> fit_response(const Dataset& data, const FitConfig& config);

/// Single-instance reconstruction: a one-instance fit with only the constant
/// coefficients free, read out as an output Hamiltonian.
OutputHamiltonian rise_fit(const SampleSet& samples, const std::vector<TermId>& output_terms,
                           const FitConfig& config);
/// Same, with the full report.
std::pair<OutputHamiltonian, FitReport> rise_fit_with_report(const SampleSet& samples,
                                                             const std::vector<TermId>& output_terms,
                                                             const FitConfig& config);

/// Linear map applied to gradient steps, block diagonal over terms.
class Preconditioner {
 public:
  Preconditioner() = default;
  /// Pseudo-inverse of each term's feature second moment.
  static Preconditioner whitening(const ScreeningObjective& objective);
  /// Inverse diagonal of each term's feature second moment.
  static Preconditioner diagonal(const ScreeningObjective& objective);

  /// Block-diagonal map from explicit blocks starting at the given offsets.
  static Preconditioner from_blocks(std::vector<std::size_t> offsets, std::vector<Eigen::MatrixXd> blocks);

  bool empty() const { return blocks_.empty(); }
  std::size_t num_blocks() const { return blocks_.size(); }
  const Eigen::MatrixXd& block(std::size_t t) const { return blocks_.at(t); }
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& grad) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Eigen::MatrixXd> blocks_;
};

/// One step on the loss of a single (instance, samples) pair. The gradient
/// kind moves to lambda - step * P * grad. The Newton kind moves by step times
/// the P-least-norm minimizer of the pair's second-order model, which at
/// step = 1 solves the pair's own screening conditions to first order.
/// Soft-thresholding follows when l1 > 0. Throws std::invalid_argument on a
/// negative step or a dimension mismatch.
LocalResponse online_update(const LocalResponse& lambda, const InputInstance& instance,
                            const SampleSet& samples, double step,
                            const Preconditioner* preconditioner = nullptr, double l1 = 0.0,
                            OnlineStep kind = OnlineStep::kGradient);

/// Streaming learner: every observed job updates all qubits' responses by one
/// online step with eta_t = step / sqrt(t), t counting observed jobs. The
/// step metric is rebuilt from the running feature moment of the inputs seen
/// so far.
class OnlineLearner {
 public:
  OnlineLearner(Topology topology, FitConfig config);

  void observe(const InputInstance& instance, const SampleSet& samples);
  std::size_t steps() const { return steps_; }
  /// Current estimate with pair terms reconciled by averaging.
  ResponseModel model() const;

 private:
  Topology topology_;
  FitConfig config_;
  std::vector<TermId> terms_;
  std::vector<LocalResponse> local_;
  Eigen::MatrixXd moment_;  // running sum of phi phi^T over observed inputs
  std::size_t steps_ = 0;
};

struct IdentifiabilityReport {
  std::size_t rank = 0;
  std::size_t required = 0;
  bool sufficient = false;
};

/// Rank of the stacked feature vectors (1, theta, upper triangle of
/// theta theta^T) restricted by the mask, against the count needed to fix a
/// response uniquely under that mask.
/// Throws std::invalid_argument on an empty list.
IdentifiabilityReport identifiability_check(const std::vector<InputInstance>& instances,
                                            MaskPreset preset);

}  // namespace isr

#endif  // ISR_ESTIMATOR_HPP_
