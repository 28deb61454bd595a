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

// Command-line front end: isr <verb> [options]. Run with --help for details.
//
// Exit codes: 0 success, 2 usage or I/O error, 3 convergence failure,
// 4 schema or version error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isr/estimator.hpp"
#include "isr/evaluate.hpp"
#include "isr/geometry.hpp"
#include "isr/io.hpp"
#include "isr/oracle.hpp"
#include "isr/rng.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitSchema = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Shared option groups

struct TopologyOptions {
  std::size_t n = 0;
  bool complete = false;
  bool chain = false;
  std::string edges;

  void add(CLI::App* app) {
    app->add_option("--n", n, "Number of qubits")->check(CLI::PositiveNumber);
    auto* c = app->add_flag("--complete", complete, "All-to-all couplings");
    auto* ch = app->add_flag("--chain", chain, "Nearest-neighbour chain");
    auto* e = app->add_option("--edges", edges, "Edge list such as 0-1,1-2");
    c->excludes(ch)->excludes(e);
    ch->excludes(e);
  }

  isr::Topology build() const {
    if (n == 0) throw UsageError("--n is required");
    if (complete) return isr::Topology::complete(n);
    if (chain) return isr::Topology::chain(n);
    std::vector<isr::Edge> list;
    std::stringstream ss(edges);
    for (std::string item; std::getline(ss, item, ',');) {
      if (item.empty()) continue;
      const auto dash = item.find('-');
      if (dash == std::string::npos) throw UsageError("bad edge '" + item + "', expected i-j");
      try {
        list.emplace_back(std::stoul(item.substr(0, dash)), std::stoul(item.substr(dash + 1)));
      } catch (const std::exception&) {
        throw UsageError("bad edge '" + item + "', expected i-j");
      }
    }
    return isr::Topology(n, std::move(list));
  }
};

struct FitOptions {
  std::string optimizer = "gd";
  std::string mask = "physical";
  std::string weighting = "uniform";
  std::string online_step = "newton";
  std::string schedule = "per-pass";
  isr::FitConfig config;

  void add(CLI::App* app, bool with_mask) {
    app->add_option("--optimizer", optimizer, "gd | entropic | online")->capture_default_str();
    if (with_mask) app->add_option("--mask", mask, "full | physical | linear | constant")->capture_default_str();
    app->add_option("--weighting", weighting, "uniform | shots")->capture_default_str();
    app->add_option("--tol", config.tolerance, "Gradient inf-norm tolerance")->capture_default_str();
    app->add_option("--max-iter", config.max_iterations, "Iteration budget")->capture_default_str();
    app->add_option("--l1", config.l1, "l1 penalty on every free coefficient")->capture_default_str();
    app->add_option("--step", config.step, "Initial step (eta0 for online)")->capture_default_str();
    app->add_option("--epochs", config.epochs, "Passes for online optimization")->capture_default_str();
    app->add_option("--online-step", online_step, "gradient | newton")->capture_default_str();
    app->add_option("--schedule", schedule, "per-update | per-pass")->capture_default_str();
    app->add_option("--radius", config.entropic_radius, "Entropic-descent l1 radius")->capture_default_str();
    app->add_option("--threads", config.threads, "Worker threads (0 = all cores)")->capture_default_str();
  }

  isr::FitConfig build() const {
    isr::FitConfig out = config;
    out.optimizer = isr::parse_optimizer(optimizer);
    out.mask = isr::parse_mask_preset(mask);
    out.online_step = isr::parse_online_step(online_step);
    out.schedule = isr::parse_step_schedule(schedule);
    if (weighting == "uniform") {
      out.weighting = isr::InstanceWeighting::kUniform;
    } else if (weighting == "shots") {
      out.weighting = isr::InstanceWeighting::kShots;
    } else {
      throw UsageError("unknown weighting '" + weighting + "'");
    }
    out.validate();
    return out;
  }
};

void write_or_print(const std::string& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
  } else {
    isr::write_file_atomic(out, content);
  }
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

json fit_report_json(const isr::FitReport& report) {
  json qubits = json::array();
  for (const auto& q : report.qubits) {
    qubits.push_back({{"qubit", q.qubit},
                      {"initial_loss", q.initial_loss},
                      {"final_loss", q.final_loss},
                      {"grad_inf_norm", q.grad_inf_norm},
                      {"iterations", q.iterations},
                      {"converged", q.converged},
                      {"rank", q.rank},
                      {"required", q.required},
                      {"loss_trace", q.loss_trace}});
  }
  return {{"format", "isr.fit_report"},
          {"version", isr::kFormatVersion},
          {"converged", report.converged()},
          {"max_grad_inf_norm", report.max_grad_inf_norm()},
          {"reconciliation_discrepancy", report.reconciliation_discrepancy},
          {"qubits", qubits},
          {"warnings", report.warnings}};
}

void print_fit_summary(const isr::FitReport& report) {
  std::cout << "qubit  final_loss      grad_inf        iterations  converged  rank/required\n";
  for (const auto& q : report.qubits) {
    char line[160];
    std::snprintf(line, sizeof(line), "%5zu  %.9f  %.6e  %10zu  %9s  %zu/%zu\n", q.qubit, q.final_loss,
                  q.grad_inf_norm, q.iterations, q.converged ? "yes" : "no", q.rank, q.required);
    std::cout << line;
  }
  std::cout << "reconciliation discrepancy: " << fmt("%.6e", report.reconciliation_discrepancy) << "\n";
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
}

// ---------------------------------------------------------------------------
// gen

struct GenInstances {
  TopologyOptions topology;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  isr::GridSpec grid;
  bool continuous = false;
  std::string out;

  void add(CLI::App* gen) {
    auto* app = gen->add_subcommand("instances", "Random input instances");
    topology.add(app);
    app->add_option("--count", count, "Number of instances")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--lo", grid.lo, "Smallest value")->capture_default_str();
    app->add_option("--hi", grid.hi, "Largest value")->capture_default_str();
    app->add_option("--grid-step", grid.step, "Grid spacing")->capture_default_str();
    app->add_flag("--continuous", continuous, "Draw from [lo, hi) instead of the grid");
    app->add_option("--out", out, "Instance file (default: stdout)");
    app->callback([this] { run(); });
  }

  void run() const {
    const isr::Topology topo = topology.build();
    std::vector<isr::InputInstance> instances;
    for (std::size_t k = 0; k < count; ++k) {
      const std::uint64_t s = isr::CounterRng(seed, k)();
      instances.push_back(continuous ? isr::random_uniform_instance(topo, grid.lo, grid.hi, s)
                                     : isr::random_grid_instance(topo, grid, s));
    }
    write_or_print(out, isr::instances_to_json(topo, instances).dump(1) + "\n");
  }
};

struct GenLayouts {
  std::size_t count = 1;
  std::uint64_t seed = 0;
  isr::SquareLayoutOptions options;
  std::string out;

  void add(CLI::App* gen) {
    auto* app = gen->add_subcommand("layouts", "Random four-atom square layouts");
    app->add_option("--count", count, "Number of layouts")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--side", options.side, "Square side in um")->capture_default_str();
    app->add_option("--shift-step", options.shift_step, "Diagonal shift step in um")->capture_default_str();
    app->add_option("--shift-levels", options.shift_levels, "Number of shift levels")->capture_default_str();
    app->add_option("--direction", options.direction, "+1 inward, -1 outward")->capture_default_str();
    app->add_option("--out", out, "Layout file (default: stdout)");
    app->callback([this] { run(); });
  }

  void run() const {
    std::vector<isr::AtomLayout> layouts;
    for (std::size_t k = 0; k < count; ++k) {
      layouts.push_back(isr::random_square_layout(isr::CounterRng(seed, k)(), options));
    }
    write_or_print(out, isr::layouts_to_json(layouts).dump(1) + "\n");
  }
};

struct GenModel {
  TopologyOptions topology;
  std::string instances;
  std::string kind = "random";
  std::string mask = "physical";
  isr::PlantedScales scales;
  std::uint64_t seed = 0;
  std::string out;

  void add(CLI::App* gen) {
    auto* app = gen->add_subcommand("model", "Planted response model");
    topology.add(app);
    app->add_option("--instances", instances, "Take the topology from an instance file");
    app->add_option("--kind", kind, "zero | identity | random")->capture_default_str();
    app->add_option("--mask", mask, "full | physical | linear | constant")->capture_default_str();
    app->add_option("--scale", scales.diagonal, "Own-slot linear response")->capture_default_str();
    app->add_option("--constant", scales.constant, "Spread of constants")->capture_default_str();
    app->add_option("--linear", scales.linear, "Spread of linear coefficients")->capture_default_str();
    app->add_option("--quadratic", scales.quadratic, "Spread of quadratic coefficients")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--out", out, "Model file (default: stdout)");
    app->callback([this] { run(); });
  }

  void run() const {
    isr::Topology topo;
    if (!instances.empty()) {
      topo = isr::load_instance_file(instances).first;
    } else {
      topo = topology.build();
    }
    const isr::MaskPreset preset = isr::parse_mask_preset(mask);
    isr::ResponseModel model;
    if (kind == "zero") {
      model = isr::ResponseModel::zeros(topo, preset);
    } else if (kind == "identity") {
      model = isr::ResponseModel::identity(topo, preset, scales.diagonal);
    } else if (kind == "random") {
      model = isr::random_planted_model(topo, preset, scales, seed);
    } else {
      throw UsageError("unknown model kind '" + kind + "'");
    }
    write_or_print(out, isr::model_to_json(model).dump(1) + "\n");
  }
};

struct GenSynthetic {
  std::string model;
  std::string instances;
  bool exact = false;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  std::string out;

  void add(CLI::App* gen) {
    auto* app = gen->add_subcommand("synthetic", "Sample a planted model into a dataset directory");
    app->add_option("--model", model, "Planted model file")->required();
    app->add_option("--instances", instances, "Instance file")->required();
    auto* e = app->add_flag("--exact", exact, "Exact-weighted sample files");
    auto* s = app->add_option("--shots", shots, "Unit-weight shots per instance");
    e->excludes(s);
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--out", out, "Dataset directory")->required();
    app->callback([this] { run(); });
  }

  void run() const {
    if (!exact && shots == 0) throw UsageError("give --exact or --shots");
    const isr::ResponseModel planted = isr::load_model(model);
    const auto list = isr::load_instances(instances);
    isr::SamplingMode mode = isr::ExactMode{};
    if (!exact) mode = isr::ShotMode{shots};
    isr::save_dataset(out, isr::generate_synthetic_dataset(planted, list, mode, seed));
  }
};

// ---------------------------------------------------------------------------
// fit / predict / rise

struct Fit {
  std::string data;
  std::string out;
  std::string report;
  bool streaming = false;
  FitOptions fit;
  int status = kExitOk;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("fit", "Learn a response model from a dataset directory");
    app->add_option("--data", data, "Dataset directory")->required();
    app->add_option("--out", out, "Model file")->required();
    app->add_option("--report", report, "Fit report file (JSON)");
    app->add_flag("--streaming", streaming, "Replay the jobs in order through the online learner");
    fit.add(app, true);
    app->callback([this] { run(); });
  }

  void run() {
    const isr::FitConfig config = fit.build();
    const isr::Dataset dataset = isr::load_dataset(data);
    if (dataset.empty()) throw UsageError("dataset " + data + " has no instances");
    isr::ModelMetadata meta;
    for (const auto& inst : dataset.instances()) meta.training_hashes.push_back(isr::instance_hash(inst));

    if (streaming) {
      isr::OnlineLearner learner(dataset.topology(), config);
      for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t k = 0; k < dataset.size(); ++k) learner.observe(dataset.instance(k), dataset.samples(k));
      }
      isr::save_model(out, learner.model(), meta);
      std::cout << "streaming fit: " << learner.steps() << " online steps\n";
      return;
    }

    const auto [model, fit_report] = isr::fit_response(dataset, config);
    isr::save_model(out, model, meta);
    if (!report.empty()) isr::write_file_atomic(report, fit_report_json(fit_report).dump(1) + "\n");
    print_fit_summary(fit_report);
    if (!fit_report.converged()) status = kExitNotConverged;
  }
};

struct Predict {
  std::string model;
  std::string instances;
  std::string out;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("predict", "Output Hamiltonians predicted for input instances");
    app->add_option("--model", model, "Model file")->required();
    app->add_option("--instances", instances, "Instance file")->required();
    app->add_option("--out", out, "Hamiltonian file (default: stdout)");
    app->callback([this] { run(); });
  }

  void run() const {
    const isr::ResponseModel m = isr::load_model(model);
    std::vector<isr::OutputHamiltonian> hams;
    for (const auto& inst : isr::load_instances(instances)) hams.push_back(isr::predict_output(inst, m));
    write_or_print(out, isr::hamiltonians_to_json(hams).dump(1) + "\n");
  }
};

struct Rise {
  std::vector<std::string> samples;
  std::string terms;
  std::string out;
  FitOptions fit;
  int status = kExitOk;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("rise", "Reconstruct the output Hamiltonian of single sample files");
    app->add_option("--samples", samples, "Sample file(s)")->required();
    app->add_option("--terms", terms, "Comma-separated terms such as J_0_1,h_0 (default: all)");
    app->add_option("--out", out, "Hamiltonian file (default: stdout)");
    fit.add(app, false);
    app->callback([this] { run(); });
  }

  void run() {
    const isr::FitConfig config = fit.build();
    std::vector<isr::OutputHamiltonian> hams;
    for (const auto& path : samples) {
      const isr::SampleSet s = isr::load_samples(path);
      std::vector<isr::TermId> list;
      if (terms.empty()) {
        list = isr::Topology::empty(s.num_qubits()).all_output_terms();
      } else {
        std::stringstream ss(terms);
        for (std::string item; std::getline(ss, item, ',');) list.push_back(isr::TermId::parse(item));
      }
      auto [ham, report] = isr::rise_fit_with_report(s, list, config);
      for (const auto& w : report.warnings) std::cerr << path << ": warning: " << w << "\n";
      if (!report.converged()) status = kExitNotConverged;
      hams.push_back(std::move(ham));
    }
    write_or_print(out, isr::hamiltonians_to_json(hams).dump(1) + "\n");
  }
};

// ---------------------------------------------------------------------------
// evaluate / check

struct Evaluate {
  std::string model;
  std::string data;
  std::string out;
  std::size_t bootstrap = 0;
  std::size_t shots = 10000;
  std::uint64_t seed = 0;
  FitOptions fit;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("evaluate", "Compare model predictions with per-instance reconstructions");
    app->add_option("--model", model, "Model file")->required();
    app->add_option("--data", data, "Test dataset directory")->required();
    app->add_option("--out", out, "Report file (JSON)");
    app->add_option("--bootstrap", bootstrap, "Bootstrap replicas per instance")->capture_default_str();
    app->add_option("--shots", shots, "Shots per bootstrap replica")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    fit.add(app, false);
    app->callback([this] { run(); });
  }

  void run() const {
    isr::ModelMetadata meta;
    const isr::ResponseModel m = isr::load_model(model, &meta);
    const isr::Dataset test = isr::load_dataset(data);
    if (test.empty()) throw UsageError("dataset " + data + " has no instances");
    if (!(test.topology() == m.topology())) throw UsageError("model and dataset topologies differ");
    isr::EvaluateOptions options;
    options.rise_config = fit.build();
    options.bootstrap = bootstrap;
    options.bootstrap_shots = shots;
    options.seed = seed;
    options.training_hashes = meta.training_hashes;
    const isr::EvaluationReport report = isr::evaluate_model(m, test, options);
    if (!out.empty()) isr::write_file_atomic(out, isr::evaluation_to_json(report).dump(1) + "\n");
    std::cout << isr::evaluation_table(report);
  }
};

struct Check {
  std::string data;
  std::string instances;
  std::string mask = "physical";

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("check", "Instance-count identifiability report");
    auto* d = app->add_option("--data", data, "Dataset directory");
    auto* i = app->add_option("--instances", instances, "Instance file");
    d->excludes(i);
    app->add_option("--mask", mask, "full | physical | linear | constant")->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() const {
    std::vector<isr::InputInstance> list;
    if (!data.empty()) {
      list = isr::load_dataset(data).instances();
    } else if (!instances.empty()) {
      list = isr::load_instances(instances);
    } else {
      throw UsageError("give --data or --instances");
    }
    if (list.empty()) throw UsageError("no instances to check");
    const auto report = isr::identifiability_check(list, isr::parse_mask_preset(mask));
    std::cout << "instances: " << list.size() << "\n"
              << "dimension: " << list.front().dimension() << "\n"
              << "mask: " << mask << "\n"
              << "rank: " << report.rank << "\n"
              << "required: " << report.required << "\n"
              << "sufficient: " << (report.sufficient ? "yes" : "no") << "\n";
  }
};

// ---------------------------------------------------------------------------
// geometry

struct GeometryConvert {
  std::string layouts;
  std::string delta_mode = "literal";
  std::optional<double> delta;
  bool normalize = false;
  std::string out;

  void add(CLI::App* geometry) {
    auto* app = geometry->add_subcommand("convert", "Ising input instances from atom layouts");
    app->add_option("--layouts", layouts, "Layout file")->required();
    app->add_option("--delta-mode", delta_mode, "literal | per-qubit-cancel")->capture_default_str();
    app->add_option("--delta", delta, "Explicit final detuning in rad/us");
    app->add_flag("--normalize", normalize, "Divide by the largest |coupling|");
    app->add_option("--out", out, "Instance file (default: stdout)");
    app->callback([this] { run(); });
  }

  void run() const {
    isr::DeltaMode mode;
    if (delta_mode == "literal") {
      mode = isr::DeltaMode::kLiteral;
    } else if (delta_mode == "per-qubit-cancel") {
      mode = isr::DeltaMode::kPerQubitCancel;
    } else {
      throw UsageError("unknown delta mode '" + delta_mode + "'");
    }
    std::vector<isr::InputInstance> list;
    for (const auto& layout : isr::load_layouts(layouts)) {
      const double d = delta ? *delta : isr::delta_rule(layout, mode);
      isr::InputInstance inst = isr::to_input_instance(isr::atoms_to_ising(layout, d));
      list.push_back(normalize ? isr::normalize_by_max_coupling(inst) : inst);
    }
    if (list.empty()) throw UsageError(layouts + " holds no layouts");
    write_or_print(out, isr::instances_to_json(list).dump(1) + "\n");
  }
};

struct GeometryTile {
  std::string layouts;
  double plane = 75.0;
  std::size_t corners = 4;
  double threshold = 1e-4;
  std::string out;

  void add(CLI::App* geometry) {
    auto* app = geometry->add_subcommand("tile", "Copy layouts to the corners of a square plane");
    app->add_option("--layouts", layouts, "Layout file")->required();
    app->add_option("--plane", plane, "Plane side in um")->capture_default_str();
    app->add_option("--corners", corners, "Number of copies (1 to 4)")->capture_default_str();
    app->add_option("--threshold", threshold, "Cross-coupling flag threshold in rad/us")->capture_default_str();
    app->add_option("--out", out, "Layout file (default: stdout)");
    app->callback([this] { run(); });
  }

  void run() const {
    std::vector<isr::AtomLayout> tiled;
    const isr::PlaneBounds bounds{0.0, 0.0, plane, plane};
    std::size_t index = 0;
    for (const auto& layout : isr::load_layouts(layouts)) {
      auto [result, report] = isr::tile_layout(layout, bounds, corners, threshold);
      std::cerr << "layout " << index++ << ": max cross coupling " << fmt("%.6e", report.max_cross_coupling)
                << " rad/us at " << fmt("%.4f", report.min_cross_distance) << " um"
                << (report.flagged ? "  FLAGGED" : "") << "\n";
      tiled.push_back(std::move(result));
    }
    write_or_print(out, isr::layouts_to_json(tiled).dump(1) + "\n");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn the response function of an analog Ising sampler"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate instances, layouts, models and synthetic data");
  gen->require_subcommand(1);
  GenInstances gen_instances;
  GenLayouts gen_layouts;
  GenModel gen_model;
  GenSynthetic gen_synthetic;
  gen_instances.add(gen);
  gen_layouts.add(gen);
  gen_model.add(gen);
  gen_synthetic.add(gen);

  Fit fit;
  fit.add(app);
  Predict predict;
  predict.add(app);
  Rise rise;
  rise.add(app);
  Evaluate evaluate;
  evaluate.add(app);
  Check check;
  check.add(app);

  auto* geometry = app.add_subcommand("geometry", "Neutral-atom geometry tools");
  geometry->require_subcommand(1);
  GeometryConvert convert;
  GeometryTile tile;
  convert.add(geometry);
  tile.add(geometry);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const isr::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return std::max(fit.status, rise.status);
}
