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

#include "isr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "isr/rng.hpp"

namespace isr {

AtomLayout::AtomLayout(std::vector<Eigen::Vector2d> positions, std::optional<PlaneBounds> bounds)
    : positions_(std::move(positions)), bounds_(bounds) {
  for (std::size_t a = 0; a < positions_.size(); ++a) {
    if (!positions_[a].allFinite()) throw std::invalid_argument("AtomLayout: atom " + std::to_string(a) + " is not finite");
    if (bounds_ && !bounds_->contains(positions_[a])) {
      throw std::invalid_argument("AtomLayout: atom " + std::to_string(a) + " lies outside the bounds");
    }
    for (std::size_t b = a + 1; b < positions_.size(); ++b) {
      if (!((positions_[a] - positions_[b]).norm() > 0.0)) {
        throw std::invalid_argument("AtomLayout: atoms " + std::to_string(a) + " and " + std::to_string(b) +
                                    " coincide");
      }
    }
  }
}

PlaneBounds AtomLayout::footprint() const {
  if (bounds_) return *bounds_;
  PlaneBounds box;
  if (positions_.empty()) return box;
  box.xmin = box.xmax = positions_.front().x();
  box.ymin = box.ymax = positions_.front().y();
  for (const auto& p : positions_) {
    box.xmin = std::min(box.xmin, p.x());
    box.xmax = std::max(box.xmax, p.x());
    box.ymin = std::min(box.ymin, p.y());
    box.ymax = std::max(box.ymax, p.y());
  }
  return box;
}

double AtomLayout::min_distance() const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < positions_.size(); ++a)
    for (std::size_t b = a + 1; b < positions_.size(); ++b) d = std::min(d, (positions_[a] - positions_[b]).norm());
  return d;
}

bool AtomLayout::operator==(const AtomLayout& other) const {
  if (positions_.size() != other.positions_.size() || bounds_ != other.bounds_) return false;
  for (std::size_t a = 0; a < positions_.size(); ++a) {
    if (positions_[a] != other.positions_[a]) return false;
  }
  return true;
}

double coupling_at_distance(double distance, const GeometryConstants& constants) {
  if (!(distance > 0.0)) throw std::invalid_argument("coupling_at_distance: distance must be positive");
  return constants.c6 / (4.0 * std::pow(distance, 6));
}

double distance_for_coupling(double coupling, const GeometryConstants& constants) {
  if (!(coupling > 0.0)) throw std::invalid_argument("distance_for_coupling: coupling must be positive");
  return std::pow(constants.c6 / (4.0 * coupling), 1.0 / 6.0);
}

IsingCoefficients atoms_to_ising(const AtomLayout& layout, double delta, const GeometryConstants& constants) {
  if (!std::isfinite(delta)) throw std::invalid_argument("atoms_to_ising: detuning must be finite");
  if (!(constants.c6 > 0.0)) throw std::invalid_argument("atoms_to_ising: C6 must be positive");
  const auto n = static_cast<Eigen::Index>(layout.size());
  IsingCoefficients out;
  out.delta = delta;
  out.couplings = Eigen::MatrixXd::Zero(n, n);
  const auto& r = layout.positions();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (r[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(j)]).norm();
      if (!(d > 0.0)) {
        throw std::invalid_argument("atoms_to_ising: atoms " + std::to_string(i) + " and " + std::to_string(j) +
                                    " coincide");
      }
      out.couplings(i, j) = out.couplings(j, i) = coupling_at_distance(d, constants);
    }
  }
  out.fields = (-out.couplings.rowwise().sum()).array() + delta / 2.0;
  return out;
}

double delta_rule(const AtomLayout& layout, DeltaMode mode, const GeometryConstants& constants) {
  if (layout.size() < 2) throw std::invalid_argument("delta_rule: need at least two atoms");
  const IsingCoefficients zero = atoms_to_ising(layout, 0.0, constants);
  const auto n = static_cast<double>(layout.size());
  switch (mode) {
    case DeltaMode::kLiteral: {
      const double pairs = n * (n - 1.0) / 2.0;
      return 2.0 * (zero.couplings.sum() / 2.0) / pairs;
    }
    case DeltaMode::kPerQubitCancel:
      return 2.0 * zero.couplings.rowwise().sum().mean();
  }
  throw std::invalid_argument("delta_rule: unknown mode");
}

AtomLayout square_layout(const std::vector<std::size_t>& shift_multiples, const SquareLayoutOptions& options) {
  if (shift_multiples.size() != 4) throw std::invalid_argument("square_layout: need four shifts");
  const double s = options.side;
  const Eigen::Vector2d corners[4] = {{0.0, 0.0}, {s, 0.0}, {s, s}, {0.0, s}};
  const Eigen::Vector2d center(s / 2.0, s / 2.0);
  std::vector<Eigen::Vector2d> positions;
  double reach = 0.0;
  for (std::size_t a = 0; a < 4; ++a) {
    if (shift_multiples[a] >= options.shift_levels) throw std::invalid_argument("square_layout: shift out of range");
    const double shift = static_cast<double>(shift_multiples[a]) * options.shift_step;
    reach = std::max(reach, shift);
    const Eigen::Vector2d diagonal = (center - corners[a]).normalized();
    positions.push_back(corners[a] + options.direction * shift * diagonal);
  }
  PlaneBounds bounds{0.0, 0.0, s, s};
  if (options.direction < 0.0) {
    const double pad = reach / std::sqrt(2.0);
    bounds = PlaneBounds{-pad, -pad, s + pad, s + pad};
  }
  return AtomLayout(std::move(positions), bounds);
}

AtomLayout random_square_layout(std::uint64_t seed, const SquareLayoutOptions& options) {
  CounterRng rng(seed);
  std::vector<std::size_t> shifts;
  for (int a = 0; a < 4; ++a) shifts.push_back(static_cast<std::size_t>(rng.below(options.shift_levels)));
  return square_layout(shifts, options);
}

std::pair<AtomLayout, TileReport> tile_layout(const AtomLayout& layout, const PlaneBounds& plane, std::size_t corners,
                                              double threshold, const GeometryConstants& constants) {
  if (corners < 1 || corners > 4) throw std::invalid_argument("tile_layout: corner count must be 1..4");
  const PlaneBounds tile = layout.footprint();
  const double w = tile.width();
  const double h = tile.height();
  if (w > plane.width() || h > plane.height()) throw std::invalid_argument("tile_layout: tile does not fit the plane");

  const Eigen::Vector2d origins[4] = {{plane.xmin, plane.ymin},
                                      {plane.xmax - w, plane.ymax - h},
                                      {plane.xmax - w, plane.ymin},
                                      {plane.xmin, plane.ymax - h}};
  std::vector<PlaneBounds> boxes;
  for (std::size_t c = 0; c < corners; ++c) {
    const PlaneBounds box{origins[c].x(), origins[c].y(), origins[c].x() + w, origins[c].y() + h};
    for (const auto& other : boxes) {
      const bool apart = box.xmin >= other.xmax || other.xmin >= box.xmax || box.ymin >= other.ymax ||
                         other.ymin >= box.ymax;
      if (!apart) throw std::invalid_argument("tile_layout: tiles overlap");
    }
    boxes.push_back(box);
  }

  std::vector<Eigen::Vector2d> positions;
  std::vector<std::size_t> owner;
  for (std::size_t c = 0; c < corners; ++c) {
    const Eigen::Vector2d offset = origins[c] - Eigen::Vector2d(tile.xmin, tile.ymin);
    for (const auto& p : layout.positions()) {
      positions.push_back(p + offset);
      owner.push_back(c);
    }
  }

  TileReport report;
  report.tiles = corners;
  report.threshold = threshold;
  report.max_cross_coupling = 0.0;
  for (std::size_t a = 0; a < positions.size(); ++a) {
    for (std::size_t b = a + 1; b < positions.size(); ++b) {
      if (owner[a] == owner[b]) continue;
      const double d = (positions[a] - positions[b]).norm();
      report.min_cross_distance = std::min(report.min_cross_distance, d);
      report.max_cross_coupling = std::max(report.max_cross_coupling, coupling_at_distance(d, constants));
    }
  }
  report.flagged = report.max_cross_coupling > threshold;
  return {AtomLayout(std::move(positions), plane), report};
}

void GridSpec::validate() const {
  if (!(step > 0.0) || !(hi > lo)) throw std::invalid_argument("GridSpec: need lo < hi and step > 0");
  const double span = (hi - lo) / step;
  if (std::abs(span - std::round(span)) > 1e-9) {
    throw std::invalid_argument("GridSpec: (hi - lo) is not a multiple of step");
  }
  if (std::abs(lo / step - std::round(lo / step)) > 1e-9) {
    throw std::invalid_argument("GridSpec: lo is not a multiple of step");
  }
}

std::size_t GridSpec::levels() const {
  return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
}

double GridSpec::value(std::size_t k) const {
  return static_cast<double>(std::llround(lo / step) + static_cast<long long>(k)) * step;
}

InputInstance random_grid_instance(const Topology& topology, const GridSpec& grid, std::uint64_t seed) {
  grid.validate();
  CounterRng rng(seed);
  const std::size_t levels = grid.levels();
  Eigen::VectorXd theta(static_cast<Eigen::Index>(topology.dimension()));
  for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = grid.value(static_cast<std::size_t>(rng.below(levels)));
  return InputInstance(topology, std::move(theta));
}

InputInstance random_uniform_instance(const Topology& topology, double lo, double hi, std::uint64_t seed) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("random_uniform_instance: need finite lo < hi");
  }
  CounterRng rng(seed);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(topology.dimension()));
  for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = lo + (hi - lo) * rng.uniform();
  return InputInstance(topology, std::move(theta));
}

InputInstance to_input_instance(const IsingCoefficients& ising) {
  const std::size_t n = ising.size();
  const Topology topology = Topology::complete(n);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(topology.dimension()));
  Eigen::Index k = 0;
  for (const auto& [i, j] : topology.edges()) {
    theta(k++) = ising.couplings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  theta.tail(static_cast<Eigen::Index>(n)) = ising.fields;
  return InputInstance(topology, std::move(theta));
}

InputInstance normalize_by_max_coupling(const InputInstance& instance) {
  const auto edges = static_cast<Eigen::Index>(instance.topology.num_edges());
  const double scale = edges > 0 ? instance.theta.head(edges).cwiseAbs().maxCoeff() : 0.0;
  if (!(scale > 0.0)) throw std::invalid_argument("normalize_by_max_coupling: no nonzero coupling");
  return InputInstance(instance.topology, instance.theta / scale);
}

}  // namespace isr
