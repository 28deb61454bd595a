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

// Neutral-atom layouts and their Ising coefficients. Lengths are in um,
// energies in rad/us.

#ifndef ISR_GEOMETRY_HPP_
#define ISR_GEOMETRY_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "isr/topology.hpp"

namespace isr {

struct PlaneBounds {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(const Eigen::Vector2d& p, double slack = 1e-9) const {
    return p.x() >= xmin - slack && p.x() <= xmax + slack && p.y() >= ymin - slack && p.y() <= ymax + slack;
  }
  bool operator==(const PlaneBounds&) const = default;
};

class AtomLayout {
 public:
  AtomLayout() = default;
  /// Throws std::invalid_argument on coincident atoms or atoms outside the
  /// bounds.
  explicit AtomLayout(std::vector<Eigen::Vector2d> positions,
                      std::optional<PlaneBounds> bounds = std::nullopt);

  std::size_t size() const { return positions_.size(); }
  const std::vector<Eigen::Vector2d>& positions() const { return positions_; }
  const std::optional<PlaneBounds>& bounds() const { return bounds_; }
  /// Given bounds, or the bounding box of the atoms.
  PlaneBounds footprint() const;
  double min_distance() const;

  bool operator==(const AtomLayout& other) const;

 private:
  std::vector<Eigen::Vector2d> positions_;
  std::optional<PlaneBounds> bounds_;
};

struct GeometryConstants {
  /// Van der Waals coefficient in rad MHz um^6.
  double c6 = 862690.0 * 2.0 * std::numbers::pi;
};

struct IsingCoefficients {
  Eigen::MatrixXd couplings;  // symmetric, zero diagonal
  Eigen::VectorXd fields;
  double delta = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(fields.size()); }
};

/// J_ij = C6 / (4 |r_i - r_j|^6), h_i = -sum_{j != i} J_ij + delta / 2.
IsingCoefficients atoms_to_ising(const AtomLayout& layout, double delta, const GeometryConstants& constants = {});

/// Pair coupling at a distance, and its inverse.
double coupling_at_distance(double distance, const GeometryConstants& constants = {});
double distance_for_coupling(double coupling, const GeometryConstants& constants = {});

enum class DeltaMode {
  kLiteral,         // twice the mean pair coupling
  kPerQubitCancel,  // twice the mean per-atom coupling sum; zeroes the mean field
};

/// Final detuning chosen from the layout. Throws std::invalid_argument for
/// fewer than two atoms.
double delta_rule(const AtomLayout& layout, DeltaMode mode, const GeometryConstants& constants = {});

struct SquareLayoutOptions {
  double side = 10.6;
  double shift_step = 0.3;
  std::size_t shift_levels = 17;  // shifts 0, 0.3, ..., 4.8
  /// +1 moves atoms toward the square's center, -1 away from it.
  double direction = 1.0;
};

/// Four atoms on a square, each displaced along its diagonal by a random
/// multiple of the shift step. Bounds enclose the base square, extended
/// outward when direction < 0.
AtomLayout random_square_layout(std::uint64_t seed, const SquareLayoutOptions& options = {});
/// Same with explicit shift multiples (one per corner: (0,0), (s,0), (s,s), (0,s)).
AtomLayout square_layout(const std::vector<std::size_t>& shift_multiples, const SquareLayoutOptions& options = {});

struct TileReport {
  std::size_t tiles = 0;
  double max_cross_coupling = 0.0;
  double min_cross_distance = std::numeric_limits<double>::infinity();
  double threshold = 1e-4;
  bool flagged = false;
};

/// Copies of the layout placed at the corners of the plane (lower-left,
/// upper-right, lower-right, upper-left). Throws std::invalid_argument if the
/// tiles do not fit or overlap.
std::pair<AtomLayout, TileReport> tile_layout(const AtomLayout& layout, const PlaneBounds& plane,
                                              std::size_t corners, double threshold = 1e-4,
                                              const GeometryConstants& constants = {});

struct GridSpec {
  double lo = -0.05;
  double hi = 0.05;
  double step = 0.01;

  /// Throws std::invalid_argument unless (hi - lo) is a positive integer
  /// multiple of step.
  void validate() const;
  std::size_t levels() const;
  /// Level k as an integer multiple of step.
  double value(std::size_t k) const;
};

/// Every coupling and field drawn i.i.d. uniformly from the grid levels.
InputInstance random_grid_instance(const Topology& topology, const GridSpec& grid, std::uint64_t seed);

/// Every coupling and field drawn i.i.d. uniformly from the interval
/// [lo, hi).
InputInstance random_uniform_instance(const Topology& topology, double lo, double hi, std::uint64_t seed);

/// Input instance on the complete graph carrying every pair coupling and
/// field of the coefficients.
InputInstance to_input_instance(const IsingCoefficients& ising);

/// Divides every parameter by the largest |coupling|. Never applied
/// implicitly.
InputInstance normalize_by_max_coupling(const InputInstance& instance);

}  // namespace isr

#endif  // ISR_GEOMETRY_HPP_
