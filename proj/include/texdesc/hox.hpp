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

#ifndef TEXDESC__HOX_HPP_
#define TEXDESC__HOX_HPP_

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "texdesc/digest.hpp"
#include "texdesc/gabor.hpp"
#include "texdesc/types.hpp"

namespace texdesc
{

enum class DescriptorTag { HOG, HOT, PBDCT };

inline std::string_view to_string(DescriptorTag tag)
{
  switch (tag) {
    case DescriptorTag::HOG: return "HOG";
    case DescriptorTag::HOT: return "HOT";
    case DescriptorTag::PBDCT: return "PBDCT";
  }
  return "?";
}

struct FeatureVector
{
  Eigen::VectorXd values;
  DescriptorTag descriptor_tag = DescriptorTag::HOG;
  std::string params_digest;
};

/// Cell/block geometry shared by HOG and HOT.
struct HistogramConfig
{
  int cells_per_side = 16;
  int block_side = 2;
  int bins = 8;
  double epsilon = 1e-5;

  Eigen::Index descriptor_length() const
  {
    const Eigen::Index blocks = cells_per_side - block_side + 1;
    return static_cast<Eigen::Index>(block_side) * block_side * blocks * blocks * bins;
  }

  std::string canonical() const
  {
    return "c=" + std::to_string(cells_per_side) + ";l=" + std::to_string(block_side) +
           ";B=" + std::to_string(bins) + ";e=" + exact(epsilon);
  }

  void validate() const
  {
    if (cells_per_side < 1 || block_side < 1 || bins < 1 || block_side > cells_per_side) {
      throw ConfigError("histogram config needs 1 <= block_side <= cells_per_side and bins >= 1");
    }
    if (!(epsilon > 0.0)) {
      throw ConfigError("histogram epsilon must be positive");
    }
  }
};

/// c*c cell histograms, one row per cell in row-major cell order.
using CellHistograms = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Bin of an orientation in [0, pi): bin b covers [b*pi/B, (b+1)*pi/B).
/// The 1e-9 nudge keeps angles computed as exact multiples of pi/B (the
/// Gabor bank orientations) in the bin they start.
inline int orientation_bin(double theta, int bins)
{
  const int b = static_cast<int>(std::floor(theta * bins / std::numbers::pi + 1e-9));
  if (b >= bins) {
    return 0;
  }
  return std::max(b, 0);
}

template <typename Scalar>
CellHistograms cell_histograms(const ResponseField<Scalar> & field, const HistogramConfig & cfg)
{
  cfg.validate();
  const Eigen::Index rows = field.magnitude.rows();
  const Eigen::Index cols = field.magnitude.cols();
  const int c = cfg.cells_per_side;
  if (rows % c != 0 || cols % c != 0) {
    throw ConfigError(
      "patch " + std::to_string(rows) + "x" + std::to_string(cols) + " is not divisible into " +
      std::to_string(c) + "x" + std::to_string(c) + " cells");
  }
  const Eigen::Index cell_h = rows / c;
  const Eigen::Index cell_w = cols / c;
  CellHistograms hist = CellHistograms::Zero(static_cast<Eigen::Index>(c) * c, cfg.bins);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index col = 0; col < cols; ++col) {
      const Eigen::Index cell = (r / cell_h) * c + col / cell_w;
      hist(cell, orientation_bin(static_cast<double>(field.orientation(r, col)), cfg.bins)) +=
        static_cast<double>(field.magnitude(r, col));
    }
  }
  return hist;
}

/// Overlapping l x l blocks in row-major order, each the row-major
/// concatenation of its cell histograms, scaled by 1/sqrt(|HB|^2 + e^2).
inline Eigen::VectorXd block_descriptor(const CellHistograms & hist, const HistogramConfig & cfg)
{
  cfg.validate();
  const int c = cfg.cells_per_side;
  const int l = cfg.block_side;
  const int bins = cfg.bins;
  if (hist.rows() != static_cast<Eigen::Index>(c) * c || hist.cols() != bins) {
    throw ConfigError("cell histogram grid does not match the histogram config");
  }
  const Eigen::Index block_len = static_cast<Eigen::Index>(l) * l * bins;
  Eigen::VectorXd out(cfg.descriptor_length());
  Eigen::VectorXd block(block_len);
  Eigen::Index offset = 0;
  for (int br = 0; br + l <= c; ++br) {
    for (int bc = 0; bc + l <= c; ++bc) {
      Eigen::Index k = 0;
      for (int i = 0; i < l; ++i) {
        for (int j = 0; j < l; ++j) {
          block.segment(k, bins) = hist.row((br + i) * c + bc + j).transpose();
          k += bins;
        }
      }
      out.segment(offset, block_len) = block / std::sqrt(block.squaredNorm() + cfg.epsilon * cfg.epsilon);
      offset += block_len;
    }
  }
  return out;
}

template <typename Derived>
FeatureVector extract_hog(const Eigen::MatrixBase<Derived> & image, const HistogramConfig & cfg = {})
{
  const auto field = gradient_response(image.template cast<double>());
  FeatureVector fv;
  fv.values = block_descriptor(cell_histograms(field, cfg), cfg);
  fv.descriptor_tag = DescriptorTag::HOG;
  fv.params_digest = fnv1a_hex("HOG;" + cfg.canonical());
  return fv;
}

template <typename Derived>
FeatureVector extract_hot(
  const Eigen::MatrixBase<Derived> & image, double sigma, const HistogramConfig & cfg = {},
  ResponseRule rule = ResponseRule::min_real)
{
  const auto field = gabor_response(image.template cast<double>(), sigma, rule);
  FeatureVector fv;
  fv.values = block_descriptor(cell_histograms(field, cfg), cfg);
  fv.descriptor_tag = DescriptorTag::HOT;
  fv.params_digest =
    fnv1a_hex("HOT;sigma=" + exact(sigma) + ";" + cfg.canonical() + ";rule=" + std::string(to_string(rule)));
  return fv;
}

inline FeatureVector extract_hog(const ImagePatch & patch, const HistogramConfig & cfg = {})
{
  return extract_hog(patch.pixels(), cfg);
}

inline FeatureVector extract_hot(
  const ImagePatch & patch, double sigma, const HistogramConfig & cfg = {},
  ResponseRule rule = ResponseRule::min_real)
{
  return extract_hot(patch.pixels(), sigma, cfg, rule);
}

}  // namespace texdesc

#endif  // TEXDESC__HOX_HPP_
