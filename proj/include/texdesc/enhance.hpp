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

#ifndef TEXDESC__ENHANCE_HPP_
#define TEXDESC__ENHANCE_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "texdesc/types.hpp"

namespace texdesc
{

/// Affine map of intensities onto [0,1]. A constant image maps to zeros.
template <typename Derived>
Image<typename Derived::Scalar> minmax_normalize(const Eigen::MatrixBase<Derived> & image)
{
  using Scalar = typename Derived::Scalar;
  const Scalar lo = image.minCoeff();
  const Scalar hi = image.maxCoeff();
  if (!(hi > lo)) {
    return Image<Scalar>::Zero(image.rows(), image.cols());
  }
  return ((image.array() - lo) / (hi - lo)).matrix();
}

inline ImagePatch minmax_normalize(const ImagePatch & patch)
{
  return ImagePatch(minmax_normalize(patch.pixels()));
}

struct ClaheConfig
{
  int grid_rows = 8;
  int grid_cols = 8;
  /// Per-bin ceiling as a fraction of the tile's pixel count.
  double clip_limit = 0.01;
  int bins = 256;

  static ClaheConfig grid(int rows, int cols)
  {
    ClaheConfig cfg;
    cfg.grid_rows = rows;
    cfg.grid_cols = cols;
    return cfg;
  }
};

namespace detail
{

inline std::vector<Eigen::Index> tile_edges(Eigen::Index extent, int tiles)
{
  std::vector<Eigen::Index> edges(static_cast<std::size_t>(tiles) + 1);
  for (int i = 0; i <= tiles; ++i) {
    edges[static_cast<std::size_t>(i)] = (static_cast<Eigen::Index>(i) * extent) / tiles;
  }
  return edges;
}

// For coordinate `pos`, the two neighbouring tile centres and the weight of
// the second one. Outside the outermost centres both indices coincide.
struct Neighbours
{
  std::size_t lo;
  std::size_t hi;
  double weight;
};

inline Neighbours neighbours(double pos, const std::vector<double> & centres)
{
  if (pos <= centres.front()) {
    return {0, 0, 0.0};
  }
  if (pos >= centres.back()) {
    return {centres.size() - 1, centres.size() - 1, 0.0};
  }
  std::size_t hi = 1;
  while (centres[hi] <= pos) {
    ++hi;
  }
  const std::size_t lo = hi - 1;
  return {lo, hi, (pos - centres[lo]) / (centres[hi] - centres[lo])};
}

template <typename Scalar>
int intensity_bin(Scalar value, int bins)
{
  const double v = std::clamp(static_cast<double>(value), 0.0, 1.0);
  return std::min(bins - 1, static_cast<int>(v * bins));
}

}  // namespace detail

/// Contrast-limited adaptive histogram equalization of a [0,1] image.
///
/// Each tile's histogram is clipped at `clip_limit * tile_pixels`; the
/// clipped excess is spread uniformly over all bins and the tile mapping is
/// the normalized cumulative histogram. Output pixels bilinearly blend the
/// mappings of the four nearest tile centres.
template <typename Derived>
Image<typename Derived::Scalar> clahe(const Eigen::MatrixBase<Derived> & image, const ClaheConfig & cfg)
{
  using Scalar = typename Derived::Scalar;
  const Eigen::Index rows = image.rows();
  const Eigen::Index cols = image.cols();
  if (cfg.bins < 2) {
    throw ConfigError("CLAHE needs at least 2 bins");
  }
  if (!(cfg.clip_limit > 0.0 && cfg.clip_limit <= 1.0)) {
    throw ConfigError("CLAHE clip_limit must lie in (0,1]");
  }
  if (cfg.grid_rows < 1 || cfg.grid_cols < 1 || cfg.grid_rows > std::min(rows, cols) ||
      cfg.grid_cols > std::min(rows, cols))
  {
    throw ConfigError(
      "CLAHE grid " + std::to_string(cfg.grid_rows) + "x" + std::to_string(cfg.grid_cols) +
      " does not fit a " + std::to_string(rows) + "x" + std::to_string(cols) + " image");
  }

  const auto row_edges = detail::tile_edges(rows, cfg.grid_rows);
  const auto col_edges = detail::tile_edges(cols, cfg.grid_cols);
  const auto bins = static_cast<std::size_t>(cfg.bins);

  // mappings[tile][bin]
  std::vector<std::vector<double>> mappings(static_cast<std::size_t>(cfg.grid_rows * cfg.grid_cols));
  for (int tr = 0; tr < cfg.grid_rows; ++tr) {
    for (int tc = 0; tc < cfg.grid_cols; ++tc) {
      const Eigen::Index r0 = row_edges[static_cast<std::size_t>(tr)];
      const Eigen::Index r1 = row_edges[static_cast<std::size_t>(tr) + 1];
      const Eigen::Index c0 = col_edges[static_cast<std::size_t>(tc)];
      const Eigen::Index c1 = col_edges[static_cast<std::size_t>(tc) + 1];
      const double pixels = static_cast<double>((r1 - r0) * (c1 - c0));

      std::vector<double> hist(bins, 0.0);
      for (Eigen::Index r = r0; r < r1; ++r) {
        for (Eigen::Index c = c0; c < c1; ++c) {
          hist[static_cast<std::size_t>(detail::intensity_bin(image(r, c), cfg.bins))] += 1.0;
        }
      }
      const double limit = cfg.clip_limit * pixels;
      double excess = 0.0;
      for (auto & count : hist) {
        if (count > limit) {
          excess += count - limit;
          count = limit;
        }
      }
      const double share = excess / static_cast<double>(bins);
      auto & mapping = mappings[static_cast<std::size_t>(tr * cfg.grid_cols + tc)];
      mapping.resize(bins);
      double running = 0.0;
      for (std::size_t b = 0; b < bins; ++b) {
        running += hist[b] + share;
        mapping[b] = std::min(1.0, running / pixels);
      }
    }
  }

  std::vector<double> row_centres(static_cast<std::size_t>(cfg.grid_rows));
  std::vector<double> col_centres(static_cast<std::size_t>(cfg.grid_cols));
  for (std::size_t i = 0; i < row_centres.size(); ++i) {
    row_centres[i] = 0.5 * static_cast<double>(row_edges[i] + row_edges[i + 1] - 1);
  }
  for (std::size_t i = 0; i < col_centres.size(); ++i) {
    col_centres[i] = 0.5 * static_cast<double>(col_edges[i] + col_edges[i + 1] - 1);
  }

  Image<Scalar> out(rows, cols);
  const auto grid_cols = static_cast<std::size_t>(cfg.grid_cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto ny = detail::neighbours(static_cast<double>(r), row_centres);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto nx = detail::neighbours(static_cast<double>(c), col_centres);
      const auto b = static_cast<std::size_t>(detail::intensity_bin(image(r, c), cfg.bins));
      const double v00 = mappings[ny.lo * grid_cols + nx.lo][b];
      const double v01 = mappings[ny.lo * grid_cols + nx.hi][b];
      const double v10 = mappings[ny.hi * grid_cols + nx.lo][b];
      const double v11 = mappings[ny.hi * grid_cols + nx.hi][b];
      const double top = v00 * (1.0 - nx.weight) + v01 * nx.weight;
      const double bottom = v10 * (1.0 - nx.weight) + v11 * nx.weight;
      out(r, c) = static_cast<Scalar>(std::clamp(top * (1.0 - ny.weight) + bottom * ny.weight, 0.0, 1.0));
    }
  }
  return out;
}

/// Two cascaded CLAHE passes: an 8x8 tile grid, then a 4x4 tile grid.
template <typename Derived>
Image<typename Derived::Scalar> ts_clahe(const Eigen::MatrixBase<Derived> & image)
{
  const auto stage1 = clahe(image, ClaheConfig::grid(8, 8));
  return clahe(stage1, ClaheConfig::grid(4, 4));
}

inline ImagePatch clahe(const ImagePatch & patch, const ClaheConfig & cfg)
{
  return ImagePatch(clahe(patch.pixels(), cfg));
}

inline ImagePatch ts_clahe(const ImagePatch & patch)
{
  return ImagePatch(ts_clahe(patch.pixels()));
}

/// Pre-processing applied before descriptor extraction: min-max
/// normalization, then (optionally) two-stage CLAHE.
inline ImagePatch enhance(const ImagePatch & patch, bool apply_clahe)
{
  ImagePatch normalized = minmax_normalize(patch);
  return apply_clahe ? ts_clahe(normalized) : normalized;
}

}  // namespace texdesc

#endif  // TEXDESC__ENHANCE_HPP_
