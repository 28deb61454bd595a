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

// Quadratic feature map used by the response family and by the
// identifiability diagnostics.
//
// Layout of phi(theta) for a D-dimensional theta, P = (D+1)(D+2)/2 entries:
//
//   [ 1 | theta_0 ... theta_{D-1} | theta_a * theta_b for a <= b, row-major ]
//
// With coefficients laid out the same way as (c, beta, chi_ab for a <= b),
// c + theta^T beta + theta^T chi theta == coeffs . phi only if the off-diagonal
// features carry a factor 2. That factor lives in the feature, so the
// coefficient vector holds chi entries verbatim.

#ifndef ISR_FEATURES_HPP_
#define ISR_FEATURES_HPP_

#include <cstddef>
#include <utility>

#include <Eigen/Core>

namespace isr {

constexpr std::size_t feature_count(std::size_t dim) {
  return (dim + 1) * (dim + 2) / 2;
}

/// Offset of chi_ab (a <= b) inside the feature vector.
constexpr std::size_t quadratic_slot(std::size_t dim, std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  // rows 0..a-1 of the upper triangle hold sum_{r<a} (dim - r) entries
  return 1 + dim + a * dim - a * (a - 1) / 2 + (b - a);
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> quadratic_features(
    const Eigen::MatrixBase<Derived>& theta) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index dim = theta.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> phi(
      static_cast<Eigen::Index>(feature_count(static_cast<std::size_t>(dim))));
  phi(0) = Scalar(1);
  phi.segment(1, dim) = theta;
  Eigen::Index k = 1 + dim;
  for (Eigen::Index a = 0; a < dim; ++a) {
    phi(k++) = theta(a) * theta(a);
    for (Eigen::Index b = a + 1; b < dim; ++b) {
      phi(k++) = Scalar(2) * theta(a) * theta(b);
    }
  }
  return phi;
}

/// Same map without the factor 2 on cross terms: (1, theta, upper triangle of
/// theta theta^T). Used for rank computations where scaling is immaterial.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> monomial_features(
    const Eigen::MatrixBase<Derived>& theta) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index dim = theta.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> phi(
      static_cast<Eigen::Index>(feature_count(static_cast<std::size_t>(dim))));
  phi(0) = Scalar(1);
  phi.segment(1, dim) = theta;
  Eigen::Index k = 1 + dim;
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = a; b < dim; ++b) phi(k++) = theta(a) * theta(b);
  }
  return phi;
}

}  // namespace isr

#endif  // ISR_FEATURES_HPP_
