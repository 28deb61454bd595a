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

// File formats.
//
// Every structured file is a JSON document with a "format" name and an
// integer "version". Doubles are written in shortest round-trip form, so
// load(save(x)) == x bit for bit.
//
// Sample files are plain text:
//
//   n=<int> total_weight=<real>
//   <weight> <s_1> ... <s_n>        one row per line, s in {+1, -1}
//
// Lines starting with '#' are comments.
//
// A dataset is a directory holding dataset.json, which names an instance
// file and one sample file per instance (paths relative to the directory).

#ifndef ISR_IO_HPP_
#define ISR_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "isr/dataset.hpp"
#include "isr/geometry.hpp"
#include "isr/hamiltonian.hpp"
#include "isr/response.hpp"
#include "isr/spins.hpp"
#include "isr/topology.hpp"

namespace isr {

inline constexpr int kFormatVersion = 1;

/// Malformed file content. what() names the source and the line or field.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& source, const std::string& detail)
      : std::runtime_error(source + ": " + detail) {}
};

/// Well-formed file written by an unsupported format version.
class VersionError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

/// Writes to a temporary sibling, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// FNV-1a over the little-endian bytes of theta in canonical order.
std::uint64_t instance_hash(const InputInstance& instance);
std::string hash_hex(std::uint64_t hash);

// -- sample files
std::string format_samples(const SampleSet& samples);
SampleSet parse_samples(std::istream& in, const std::string& source = "<samples>");
void save_samples(const std::filesystem::path& path, const SampleSet& samples);
SampleSet load_samples(const std::filesystem::path& path);

// -- instance files (one topology, any number of instances)
/// Throws std::invalid_argument on an empty list; use the overload taking a
/// topology to write one.
nlohmann::json instances_to_json(const std::vector<InputInstance>& instances);
nlohmann::json instances_to_json(const Topology& topology, const std::vector<InputInstance>& instances);
std::vector<InputInstance> instances_from_json(const nlohmann::json& doc, const std::string& source);
void save_instances(const std::filesystem::path& path, const std::vector<InputInstance>& instances);
std::vector<InputInstance> load_instances(const std::filesystem::path& path);
/// The file's topology along with its instances, which may be empty.
std::pair<Topology, std::vector<InputInstance>> load_instance_file(const std::filesystem::path& path);

// -- response model files
struct ModelMetadata {
  std::vector<std::uint64_t> training_hashes;
};
nlohmann::json model_to_json(const ResponseModel& model, const ModelMetadata& meta = {});
ResponseModel model_from_json(const nlohmann::json& doc, const std::string& source, ModelMetadata* meta = nullptr);
void save_model(const std::filesystem::path& path, const ResponseModel& model, const ModelMetadata& meta = {});
ResponseModel load_model(const std::filesystem::path& path, ModelMetadata* meta = nullptr);

// -- layout files
nlohmann::json layouts_to_json(const std::vector<AtomLayout>& layouts);
std::vector<AtomLayout> layouts_from_json(const nlohmann::json& doc, const std::string& source);
void save_layouts(const std::filesystem::path& path, const std::vector<AtomLayout>& layouts);
std::vector<AtomLayout> load_layouts(const std::filesystem::path& path);

// -- output Hamiltonian files
nlohmann::json hamiltonians_to_json(const std::vector<OutputHamiltonian>& hams);
std::vector<OutputHamiltonian> hamiltonians_from_json(const nlohmann::json& doc, const std::string& source);
void save_hamiltonians(const std::filesystem::path& path, const std::vector<OutputHamiltonian>& hams);
std::vector<OutputHamiltonian> load_hamiltonians(const std::filesystem::path& path);

// -- dataset directories
void save_dataset(const std::filesystem::path& dir, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace isr

#endif  // ISR_IO_HPP_
