// Copyright 2026 The texdesc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TEXDESC__PBDCT_HPP_
#define TEXDESC__PBDCT_HPP_

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "texdesc/digest.hpp"
#include "texdesc/hox.hpp"
#include "texdesc/types.hpp"

namespace texdesc
{

/// Orthonormal DCT-II basis, row u holding s(u) cos((2x+1) u pi / 2n) with
/// s(0) = sqrt(1/n) and s(u) = sqrt(2/n) otherwise.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dct_basis(Eigen::Index n)
{
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> basis(n, n);
  const double dn = static_cast<double>(n);
  for (Eigen::Index u = 0; u < n; ++u) {
    const double scale = u == 0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
    for (Eigen::Index x = 0; x < n; ++x) {
      basis(u, x) = static_cast<Scalar>(
        scale * std::cos(static_cast<double>((2 * x + 1) * u) * std::numbers::pi / (2.0 * dn)));
    }
  }
  return basis;
}

/// Separable orthonormal 2-D DCT-II: F = C_M * I * C_N^T.
template <typename Derived>
Image<typename Derived::Scalar> dct2(const Eigen::MatrixBase<Derived> & image)
{
  using Scalar = typename Derived::Scalar;
  const auto cm = dct_basis<Scalar>(image.rows());
  const auto cn = dct_basis<Scalar>(image.cols());
  return cm * image * cn.transpose();
}

template <typename Derived>
Image<typename Derived::Scalar> idct2(const Eigen::MatrixBase<Derived> & coeffs)
{
  using Scalar = typename Derived::Scalar;
  const auto cm = dct_basis<Scalar>(coeffs.rows());
  const auto cn = dct_basis<Scalar>(coeffs.cols());
  return cm.transpose() * coeffs * cn;
}

/// Retained low/middle-frequency coefficient positions, in zigzag order
/// (u + v ascending, then u ascending).
struct BandMask
{
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  double keep_fraction = 1.0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> kept_indices;

  std::size_t pool_size() const noexcept { return kept_indices.size(); }
};

inline BandMask band_mask(Eigen::Index rows, Eigen::Index cols, double keep_fraction)
{
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw DomainError("keep_fraction must lie in (0,1], got " + std::to_string(keep_fraction));
  }
  if (rows < 1 || cols < 1) {
    throw DomainError("band mask shape must be positive");
  }
  const double total = static_cast<double>(rows * cols);
  const auto pool = static_cast<std::size_t>(std::ceil(keep_fraction * total - 1e-9));
  BandMask mask{rows, cols, keep_fraction, {}};
  mask.kept_indices.reserve(pool);
  for (Eigen::Index s = 0; s <= rows + cols - 2 && mask.kept_indices.size() < pool; ++s) {
    const Eigen::Index u_lo = std::max<Eigen::Index>(0, s - cols + 1);
    const Eigen::Index u_hi = std::min<Eigen::Index>(s, rows - 1);
    for (Eigen::Index u = u_lo; u <= u_hi && mask.kept_indices.size() < pool; ++u) {
      mask.kept_indices.emplace_back(u, s - u);
    }
  }
  return mask;
}

template <typename Derived>
FeatureVector extract_pbdct(const Eigen::MatrixBase<Derived> & image, const BandMask & mask)
{
  if (image.rows() != mask.rows || image.cols() != mask.cols) {
    throw ConfigError(
      "band mask shape " + std::to_string(mask.rows) + "x" + std::to_string(mask.cols) +
      " does not match patch " + std::to_string(image.rows()) + "x" + std::to_string(image.cols()));
  }
  const ImageD coeffs = dct2(image.template cast<double>());
  FeatureVector fv;
  fv.values.resize(static_cast<Eigen::Index>(mask.pool_size()));
  for (std::size_t i = 0; i < mask.pool_size(); ++i) {
    const auto [u, v] = mask.kept_indices[i];
    fv.values(static_cast<Eigen::Index>(i)) = coeffs(u, v);
  }
  fv.descriptor_tag = DescriptorTag::PBDCT;
  fv.params_digest = fnv1a_hex(
    "PBDCT;keep=" + exact(mask.keep_fraction) + ";shape=" + std::to_string(mask.rows) + "x" +
    std::to_string(mask.cols));
  return fv;
}

inline FeatureVector extract_pbdct(const ImagePatch & patch, const BandMask & mask)
{
  return extract_pbdct(patch.pixels(), mask);
}

}  // namespace texdesc

#endif  // TEXDESC__PBDCT_HPP_
