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

#include "isr/dataset.hpp"

#include <stdexcept>
#include <string>

namespace isr {

Dataset::Dataset(Topology topology, std::vector<InputInstance> instances,
                 std::vector<SampleSet> samples)
    : topology_(std::move(topology)) {
  if (instances.size() != samples.size()) {
    throw std::invalid_argument("Dataset: " + std::to_string(instances.size()) + " instances but " +
                                std::to_string(samples.size()) + " sample sets");
  }
  for (std::size_t k = 0; k < instances.size(); ++k) add(std::move(instances[k]), std::move(samples[k]));
}

void Dataset::add(InputInstance instance, SampleSet samples) {
  if (!(instance.topology == topology_)) {
    throw std::invalid_argument("Dataset: instance " + std::to_string(instances_.size()) +
                                " has a different topology");
  }
  if (samples.num_qubits() != topology_.num_qubits()) {
    throw std::invalid_argument("Dataset: sample set " + std::to_string(samples_.size()) + " has " +
                                std::to_string(samples.num_qubits()) + " qubits, expected " +
                                std::to_string(topology_.num_qubits()));
  }
  instances_.push_back(std::move(instance));
  samples_.push_back(std::move(samples));
}

}  // namespace isr
