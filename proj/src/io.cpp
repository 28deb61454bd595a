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

#include "isr/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

#include "isr/features.hpp"

namespace isr {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t instance_hash(const InputInstance& instance) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (Eigen::Index k = 0; k < instance.theta.size(); ++k) {
    auto bits = std::bit_cast<std::uint64_t>(instance.theta(k));
    for (int b = 0; b < 8; ++b) {
      hash ^= (bits >> (8 * b)) & 0xffU;
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

std::string hash_hex(std::uint64_t hash) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << hash;
  return ss.str();
}

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Field access with a dotted path for diagnostics.
class Reader {
 public:
  Reader(const json& node, std::string source, std::string path = "")
      : node_(node), source_(std::move(source)), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& detail) const {
    throw SchemaError(source_, (path_.empty() ? std::string("<root>") : path_) + ": " + detail);
  }

  Reader at(const std::string& key) const {
    if (!node_.is_object()) fail("expected an object");
    const auto it = node_.find(key);
    if (it == node_.end()) Reader(node_, source_, join(key)).fail("missing field");
    return Reader(*it, source_, join(key));
  }
  bool has(const std::string& key) const { return node_.is_object() && node_.contains(key); }

  Reader at(std::size_t index) const {
    if (!node_.is_array()) fail("expected an array");
    if (index >= node_.size()) fail("index " + std::to_string(index) + " out of range");
    return Reader(node_[index], source_, path_ + "[" + std::to_string(index) + "]");
  }

  std::size_t size() const {
    if (!node_.is_array()) fail("expected an array");
    return node_.size();
  }
  std::size_t size(std::size_t expected) const {
    const std::size_t s = size();
    if (s != expected) fail("expected " + std::to_string(expected) + " entries, found " + std::to_string(s));
    return s;
  }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    const double v = node_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  std::size_t index() const {
    if (!node_.is_number_unsigned() && !(node_.is_number_integer() && node_.get<long long>() >= 0)) {
      fail("expected a nonnegative integer");
    }
    return node_.get<std::size_t>();
  }
  bool boolean() const {
    if (!node_.is_boolean()) fail("expected true or false");
    return node_.get<bool>();
  }
  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }
  Eigen::VectorXd vector(std::size_t expected) const {
    size(expected);
    Eigen::VectorXd v(static_cast<Eigen::Index>(expected));
    for (std::size_t k = 0; k < expected; ++k) v(static_cast<Eigen::Index>(k)) = at(k).number();
    return v;
  }
  const json& raw() const { return node_; }
  const std::string& source() const { return source_; }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& node_;
  std::string source_;
  std::string path_;
};

void check_header(const Reader& doc, const std::string& format) {
  const std::string found = doc.at("format").string();
  if (found != format) doc.at("format").fail("expected format '" + format + "', found '" + found + "'");
  const auto version = doc.at("version");
  if (!version.raw().is_number_integer()) version.fail("expected an integer");
  const int v = version.raw().get<int>();
  if (v != kFormatVersion) {
    throw VersionError(doc.source(), "version: file has version " + std::to_string(v) + ", this build reads version " +
                                         std::to_string(kFormatVersion));
  }
}

json header(const std::string& format) { return json{{"format", format}, {"version", kFormatVersion}}; }

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line:column.
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError(source, "line " + std::to_string(line) + ", column " + std::to_string(col) +
                                  ": malformed JSON");
  }
}

json topology_to_json(const Topology& topology) {
  json edges = json::array();
  for (const auto& [i, j] : topology.edges()) edges.push_back({i, j});
  return json{{"n", topology.num_qubits()}, {"edges", edges}};
}

Topology topology_from_json(const Reader& node) {
  const std::size_t n = node.at("n").index();
  const auto edges_node = node.at("edges");
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < edges_node.size(); ++k) {
    const auto e = edges_node.at(k);
    e.size(2);
    edges.emplace_back(e.at(0).index(), e.at(1).index());
  }
  try {
    return Topology(n, std::move(edges));
  } catch (const std::invalid_argument& err) {
    node.fail(err.what());
  }
}

TermId term_from_json(const Reader& node) {
  try {
    return TermId::parse(node.string());
  } catch (const std::invalid_argument& err) {
    node.fail(err.what());
  }
}

json double_array(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

json parse_file(const fs::path& path) { return parse_json(read_file(path), path.string()); }

}  // namespace

// ---------------------------------------------------------------------------
// Samples

std::string format_samples(const SampleSet& samples) {
  std::string out = "n=" + std::to_string(samples.num_qubits()) + " total_weight=" + shortest(samples.total_weight()) + "\n";
  for (std::size_t r = 0; r < samples.num_rows(); ++r) {
    out += shortest(samples.weights()(static_cast<Eigen::Index>(r)));
    for (Eigen::Index i = 0; i < samples.spins().cols(); ++i) {
      out += samples.spins()(static_cast<Eigen::Index>(r), i) > 0 ? " +1" : " -1";
    }
    out += '\n';
  }
  return out;
}

SampleSet parse_samples(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& detail) -> SchemaError {
    return SchemaError(source, "line " + std::to_string(line_no) + ": " + detail);
  };
  auto parse_double = [&](std::string_view token, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      throw fail(std::string("bad ") + what + " '" + std::string(token) + "'");
    }
    return v;
  };

  bool have_header = false;
  std::size_t n = 0;
  double declared_total = 0.0;
  std::vector<std::vector<int>> rows;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::istringstream tokens(line);
    std::vector<std::string> parts;
    for (std::string t; tokens >> t;) parts.push_back(t);
    if (parts.empty()) continue;
    if (!have_header) {
      if (parts.size() != 2 || parts[0].rfind("n=", 0) != 0 || parts[1].rfind("total_weight=", 0) != 0) {
        throw fail("expected header 'n=<int> total_weight=<real>'");
      }
      const std::string_view nv = std::string_view(parts[0]).substr(2);
      const auto res = std::from_chars(nv.data(), nv.data() + nv.size(), n);
      if (res.ec != std::errc() || res.ptr != nv.data() + nv.size() || n == 0) throw fail("bad qubit count");
      declared_total = parse_double(std::string_view(parts[1]).substr(13), "total_weight");
      have_header = true;
      continue;
    }
    if (parts.size() != n + 1) {
      throw fail("expected a weight and " + std::to_string(n) + " spins, found " + std::to_string(parts.size()) +
                 " fields");
    }
    const double w = parse_double(parts[0], "weight");
    if (!(w >= 0.0) || !std::isfinite(w)) throw fail("weight " + parts[0] + " is negative or not finite");
    std::vector<int> row(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = parts[i + 1];
      if (s == "+1" || s == "1") {
        row[i] = 1;
      } else if (s == "-1") {
        row[i] = -1;
      } else {
        throw fail("spin " + std::to_string(i) + " is '" + s + "', expected +1 or -1");
      }
    }
    rows.push_back(std::move(row));
    weights.push_back(w);
  }
  if (!have_header) throw SchemaError(source, "missing header");
  if (rows.empty()) throw SchemaError(source, "no sample rows");
  Eigen::MatrixXi spins(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  Eigen::VectorXd w(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < n; ++i) spins(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = rows[r][i];
    w(static_cast<Eigen::Index>(r)) = weights[r];
  }
  SampleSet samples;
  try {
    samples = SampleSet(n, std::move(spins), std::move(w));
  } catch (const std::invalid_argument& err) {
    throw SchemaError(source, err.what());
  }
  if (std::abs(samples.total_weight() - declared_total) > 1e-9 * std::max(1.0, declared_total)) {
    throw SchemaError(source, "line 1: total_weight " + shortest(declared_total) + " does not match row sum " +
                                  shortest(samples.total_weight()));
  }
  return samples;
}

void save_samples(const fs::path& path, const SampleSet& samples) { write_file_atomic(path, format_samples(samples)); }

SampleSet load_samples(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_samples(in, path.string());
}

// ---------------------------------------------------------------------------
// Instances

json instances_to_json(const Topology& topology, const std::vector<InputInstance>& instances) {
  json doc = header("isr.instances");
  doc["topology"] = topology_to_json(topology);
  doc["parameter_order"] = canonical_labels(topology);
  json list = json::array();
  for (const auto& inst : instances) {
    if (!(inst.topology == topology)) throw std::invalid_argument("instances_to_json: mixed topologies");
    list.push_back(double_array(inst.theta));
  }
  doc["instances"] = list;
  return doc;
}

json instances_to_json(const std::vector<InputInstance>& instances) {
  if (instances.empty()) throw std::invalid_argument("instances_to_json: no instances");
  return instances_to_json(instances.front().topology, instances);
}

namespace {

std::pair<Topology, std::vector<InputInstance>> read_instances(const json& root, const std::string& source) {
  const Reader doc(root, source);
  check_header(doc, "isr.instances");
  Topology topology = topology_from_json(doc.at("topology"));
  if (doc.has("parameter_order")) {
    const auto order = doc.at("parameter_order");
    const auto labels = canonical_labels(topology);
    order.size(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (order.at(k).string() != labels[k]) order.at(k).fail("expected '" + labels[k] + "'");
    }
  }
  const auto list = doc.at("instances");
  std::vector<InputInstance> out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    out.emplace_back(topology, list.at(k).vector(topology.dimension()));
  }
  return {std::move(topology), std::move(out)};
}

}  // namespace

std::vector<InputInstance> instances_from_json(const json& root, const std::string& source) {
  return read_instances(root, source).second;
}

void save_instances(const fs::path& path, const std::vector<InputInstance>& instances) {
  write_file_atomic(path, instances_to_json(instances).dump(1) + "\n");
}

std::vector<InputInstance> load_instances(const fs::path& path) {
  return instances_from_json(parse_file(path), path.string());
}

std::pair<Topology, std::vector<InputInstance>> load_instance_file(const fs::path& path) {
  return read_instances(parse_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Models

json model_to_json(const ResponseModel& model, const ModelMetadata& meta) {
  json doc = header("isr.response_model");
  doc["topology"] = topology_to_json(model.topology());
  doc["dimension"] = model.dimension();
  doc["parameter_order"] = canonical_labels(model.topology());
  doc["mask_preset"] = to_string(model.preset());
  json hashes = json::array();
  for (const auto h : meta.training_hashes) hashes.push_back(hash_hex(h));
  doc["training_instance_hashes"] = hashes;
  const auto d = static_cast<Eigen::Index>(model.dimension());
  json terms = json::array();
  for (const auto& [term, p] : model.terms()) {
    json beta_free = json::array();
    for (Eigen::Index a = 0; a < d; ++a) beta_free.push_back(static_cast<bool>(p.beta_free(a)));
    json chi = json::array();
    json chi_free = json::array();
    for (Eigen::Index a = 0; a < d; ++a) {
      json row = json::array();
      json row_free = json::array();
      for (Eigen::Index b = a; b < d; ++b) {
        row.push_back(p.chi(a, b));
        row_free.push_back(static_cast<bool>(p.chi_free(a, b)));
      }
      chi.push_back(row);
      chi_free.push_back(row_free);
    }
    terms.push_back(json{{"term", term.label()},
                         {"c", p.c},
                         {"beta", double_array(p.beta)},
                         {"beta_free", beta_free},
                         {"chi_upper", chi},
                         {"chi_free_upper", chi_free}});
  }
  doc["terms"] = terms;
  return doc;
}

ResponseModel model_from_json(const json& root, const std::string& source, ModelMetadata* meta) {
  const Reader doc(root, source);
  check_header(doc, "isr.response_model");
  const Topology topology = topology_from_json(doc.at("topology"));
  const std::size_t dim = topology.dimension();
  if (doc.at("dimension").index() != dim) doc.at("dimension").fail("does not match the topology");
  if (doc.has("parameter_order")) {
    const auto order = doc.at("parameter_order");
    const auto labels = canonical_labels(topology);
    order.size(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (order.at(k).string() != labels[k]) order.at(k).fail("expected '" + labels[k] + "'");
    }
  }
  MaskPreset preset;
  try {
    preset = parse_mask_preset(doc.at("mask_preset").string());
  } catch (const std::invalid_argument& err) {
    doc.at("mask_preset").fail(err.what());
  }
  if (meta != nullptr) {
    meta->training_hashes.clear();
    if (doc.has("training_instance_hashes")) {
      const auto hashes = doc.at("training_instance_hashes");
      for (std::size_t k = 0; k < hashes.size(); ++k) {
        const std::string hex = hashes.at(k).string();
        std::uint64_t h = 0;
        const auto res = std::from_chars(hex.data(), hex.data() + hex.size(), h, 16);
        if (res.ec != std::errc() || res.ptr != hex.data() + hex.size()) hashes.at(k).fail("bad hash");
        meta->training_hashes.push_back(h);
      }
    }
  }
  std::map<TermId, ResponseTermParams> params;
  const auto terms = doc.at("terms");
  const auto d = static_cast<Eigen::Index>(dim);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto t = terms.at(k);
    const TermId term = term_from_json(t.at("term"));
    if (term.i >= topology.num_qubits() || term.j >= topology.num_qubits()) t.at("term").fail("out of range");
    ResponseTermParams p = ResponseTermParams::zeros(dim, false, false);
    p.c = t.at("c").number();
    p.beta = t.at("beta").vector(dim);
    const auto bf = t.at("beta_free");
    bf.size(dim);
    for (Eigen::Index a = 0; a < d; ++a) p.beta_free(a) = bf.at(static_cast<std::size_t>(a)).boolean();
    const auto chi = t.at("chi_upper");
    const auto cf = t.at("chi_free_upper");
    chi.size(dim);
    cf.size(dim);
    for (Eigen::Index a = 0; a < d; ++a) {
      const auto row = chi.at(static_cast<std::size_t>(a));
      const auto row_free = cf.at(static_cast<std::size_t>(a));
      row.size(dim - static_cast<std::size_t>(a));
      row_free.size(dim - static_cast<std::size_t>(a));
      for (Eigen::Index b = a; b < d; ++b) {
        const auto off = static_cast<std::size_t>(b - a);
        p.chi(a, b) = p.chi(b, a) = row.at(off).number();
        p.chi_free(a, b) = p.chi_free(b, a) = row_free.at(off).boolean();
      }
    }
    for (Eigen::Index a = 0; a < d; ++a) {
      if (!p.beta_free(a) && p.beta(a) != 0.0) t.at("beta").at(static_cast<std::size_t>(a)).fail("pinned entry must be 0");
      for (Eigen::Index b = a; b < d; ++b) {
        if (!p.chi_free(a, b) && p.chi(a, b) != 0.0) {
          chi.at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b - a)).fail("pinned entry must be 0");
        }
      }
    }
    if (!params.emplace(term, std::move(p)).second) t.at("term").fail("duplicate term " + term.label());
  }
  return ResponseModel(topology, preset, std::move(params));
}

void save_model(const fs::path& path, const ResponseModel& model, const ModelMetadata& meta) {
  write_file_atomic(path, model_to_json(model, meta).dump(1) + "\n");
}

ResponseModel load_model(const fs::path& path, ModelMetadata* meta) {
  return model_from_json(parse_file(path), path.string(), meta);
}

// ---------------------------------------------------------------------------
// Layouts

json layouts_to_json(const std::vector<AtomLayout>& layouts) {
  json doc = header("isr.layouts");
  doc["units"] = "um";
  json list = json::array();
  for (const auto& layout : layouts) {
    json positions = json::array();
    for (const auto& p : layout.positions()) positions.push_back({p.x(), p.y()});
    json entry{{"positions", positions}};
    if (layout.bounds()) {
      const auto& b = *layout.bounds();
      entry["bounds"] = json{b.xmin, b.ymin, b.xmax, b.ymax};
    } else {
      entry["bounds"] = nullptr;
    }
    list.push_back(entry);
  }
  doc["layouts"] = list;
  return doc;
}

std::vector<AtomLayout> layouts_from_json(const json& root, const std::string& source) {
  const Reader doc(root, source);
  check_header(doc, "isr.layouts");
  if (doc.at("units").string() != "um") doc.at("units").fail("only 'um' is supported");
  const auto list = doc.at("layouts");
  std::vector<AtomLayout> out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const auto entry = list.at(k);
    const auto positions = entry.at("positions");
    std::vector<Eigen::Vector2d> points;
    for (std::size_t a = 0; a < positions.size(); ++a) {
      const auto v = positions.at(a).vector(2);
      points.emplace_back(v(0), v(1));
    }
    std::optional<PlaneBounds> bounds;
    if (entry.has("bounds") && !entry.at("bounds").raw().is_null()) {
      const auto b = entry.at("bounds").vector(4);
      bounds = PlaneBounds{b(0), b(1), b(2), b(3)};
    }
    try {
      out.emplace_back(std::move(points), bounds);
    } catch (const std::invalid_argument& err) {
      entry.fail(err.what());
    }
  }
  return out;
}

void save_layouts(const fs::path& path, const std::vector<AtomLayout>& layouts) {
  write_file_atomic(path, layouts_to_json(layouts).dump(1) + "\n");
}

std::vector<AtomLayout> load_layouts(const fs::path& path) { return layouts_from_json(parse_file(path), path.string()); }

// ---------------------------------------------------------------------------
// Hamiltonians

json hamiltonians_to_json(const std::vector<OutputHamiltonian>& hams) {
  json doc = header("isr.hamiltonians");
  doc["convention"] = "p ~ exp(+E)";
  json list = json::array();
  for (const auto& ham : hams) {
    json terms = json::object();
    for (const auto& [term, v] : ham.terms) terms[term.label()] = v;
    list.push_back(json{{"n", ham.n}, {"terms", terms}});
  }
  doc["hamiltonians"] = list;
  return doc;
}

std::vector<OutputHamiltonian> hamiltonians_from_json(const json& root, const std::string& source) {
  const Reader doc(root, source);
  check_header(doc, "isr.hamiltonians");
  const auto list = doc.at("hamiltonians");
  std::vector<OutputHamiltonian> out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const auto entry = list.at(k);
    OutputHamiltonian ham(entry.at("n").index());
    const auto terms = entry.at("terms");
    if (!terms.raw().is_object()) terms.fail("expected an object");
    for (const auto& [label, value] : terms.raw().items()) {
      const Reader v(value, source, "hamiltonians[" + std::to_string(k) + "].terms." + label);
      TermId term;
      try {
        term = TermId::parse(label);
        ham.set(term, v.number());
      } catch (const std::invalid_argument& err) {
        v.fail(err.what());
      }
    }
    out.push_back(std::move(ham));
  }
  return out;
}

void save_hamiltonians(const fs::path& path, const std::vector<OutputHamiltonian>& hams) {
  write_file_atomic(path, hamiltonians_to_json(hams).dump(1) + "\n");
}

std::vector<OutputHamiltonian> load_hamiltonians(const fs::path& path) {
  return hamiltonians_from_json(parse_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Datasets

void save_dataset(const fs::path& dir, const Dataset& data) {
  fs::create_directories(dir / "samples");
  write_file_atomic(dir / "instances.json", instances_to_json(data.topology(), data.instances()).dump(1) + "\n");
  json doc = header("isr.dataset");
  doc["instances"] = "instances.json";
  json samples = json::array();
  for (std::size_t k = 0; k < data.size(); ++k) {
    std::ostringstream name;
    name << "samples/" << std::setw(5) << std::setfill('0') << k << ".txt";
    save_samples(dir / name.str(), data.samples(k));
    samples.push_back(name.str());
  }
  doc["samples"] = samples;
  write_file_atomic(dir / "dataset.json", doc.dump(1) + "\n");
}

Dataset load_dataset(const fs::path& dir) {
  const fs::path manifest = dir / "dataset.json";
  const json root = parse_file(manifest);
  const Reader doc(root, manifest.string());
  check_header(doc, "isr.dataset");
  const fs::path instance_path = dir / doc.at("instances").string();
  auto [topology, instances] = read_instances(parse_file(instance_path), instance_path.string());
  const auto samples = doc.at("samples");
  samples.size(instances.size());
  Dataset data(topology);
  for (std::size_t k = 0; k < instances.size(); ++k) {
    SampleSet s = load_samples(dir / samples.at(k).string());
    if (s.num_qubits() != data.topology().num_qubits()) {
      samples.at(k).fail("sample file has " + std::to_string(s.num_qubits()) + " qubits");
    }
    data.add(std::move(instances[k]), std::move(s));
  }
  return data;
}

}  // namespace isr
