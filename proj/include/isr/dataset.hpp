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

#ifndef ISR_DATASET_HPP_
#define ISR_DATASET_HPP_

#include <cstddef>
#include <vector>

#include "isr/spins.hpp"
#include "isr/topology.hpp"

namespace isr {

/// Input instances paired with the samples a device returned for each.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Topology topology) : topology_(std::move(topology)) {}
  /// Throws std::invalid_argument on a topology or qubit-count mismatch.
  Dataset(Topology topology, std::vector<InputInstance> instances, std::vector<SampleSet> samples);

  void add(InputInstance instance, SampleSet samples);

  const Topology& topology() const { return topology_; }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  const std::vector<InputInstance>& instances() const { return instances_; }
  const std::vector<SampleSet>& samples() const { return samples_; }
  const InputInstance& instance(std::size_t k) const { return instances_.at(k); }
  const SampleSet& samples(std::size_t k) const { return samples_.at(k); }

 private:
  Topology topology_;
  std::vector<InputInstance> instances_;
  std::vector<SampleSet> samples_;
};

}  // namespace isr

#endif  // ISR_DATASET_HPP_
