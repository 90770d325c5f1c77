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

// Straightforward reference implementations used to cross-check the
// library. They favour plain loops over speed and share no code with it.

#ifndef TESTS__ORACLES_HPP_
#define TESTS__ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "texdesc/types.hpp"

namespace texdesc::oracle
{

/// Orthonormal DCT-II by the direct quadruple loop.
inline ImageD dct_direct(const ImageD & in)
{
  const Eigen::Index m = in.rows();
  const Eigen::Index n = in.cols();
  const double pi = std::numbers::pi;
  ImageD out(m, n);
  for (Eigen::Index u = 0; u < m; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) {
      const double au = u == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
      const double av = v == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      double sum = 0.0;
      for (Eigen::Index x = 0; x < m; ++x) {
        for (Eigen::Index y = 0; y < n; ++y) {
          sum += in(x, y) * std::cos(pi * (2 * x + 1) * u / (2.0 * m)) * std::cos(pi * (2 * y + 1) * v / (2.0 * n));
        }
      }
      out(u, v) = au * av * sum;
    }
  }
  return out;
}

/// Eight-way Gabor filtering by per-pixel loops with clamped borders.
/// The kernel is written out from the closed form; tap order (row, then
/// column of the kernel) matches a straightforward accumulation.
struct GaborOracleResult
{
  ImageD magnitude;
  ImageD orientation;
};

inline GaborOracleResult gabor_brute_force(const ImageD & img, double sigma)
{
  const double pi = std::numbers::pi;
  const double mu = 1.0 / std::sqrt(2.0 * sigma);
  const int radius = std::max(2, static_cast<int>(std::lround(3.0 * sigma)));
  const Eigen::Index rows = img.rows();
  const Eigen::Index cols = img.cols();
  GaborOracleResult res{ImageD::Zero(rows, cols), ImageD::Zero(rows, cols)};
  const int side = 2 * radius + 1;
  std::vector<double> taps(static_cast<std::size_t>(side * side));
  for (int t = 0; t < 8; ++t) {
    const double theta = pi * t / 8;
    for (int dy = -radius; dy <= radius; ++dy) {
      for (int dx = -radius; dx <= radius; ++dx) {
        const double x = dx;
        const double y = dy;
        taps[static_cast<std::size_t>((dy + radius) * side + dx + radius)] =
          1.0 / (2.0 * pi * sigma * sigma) * std::exp(-(x * x + y * y) / (2.0 * sigma * sigma)) *
          std::cos(2.0 * pi * (mu * x * std::cos(theta) + mu * y * std::sin(theta)));
      }
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        double acc = 0.0;
        for (int dy = -radius; dy <= radius; ++dy) {
          for (int dx = -radius; dx <= radius; ++dx) {
            const Eigen::Index sr = std::clamp<Eigen::Index>(r - dy, 0, rows - 1);
            const Eigen::Index sc = std::clamp<Eigen::Index>(c - dx, 0, cols - 1);
            acc = acc + taps[static_cast<std::size_t>((dy + radius) * side + dx + radius)] * img(sr, sc);
          }
        }
        if (t == 0 || acc < res.magnitude(r, c)) {
          res.magnitude(r, c) = acc;
          res.orientation(r, c) = theta;
        }
      }
    }
  }
  return res;
}

/// |Welch t| per column with two-pass sample variances.
inline std::vector<double> welch_abs_t(const FeatureMatrix & x, const std::vector<int> & labels)
{
  std::vector<double> out(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double sum[2] = {0, 0};
    double n[2] = {0, 0};
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int k = labels[static_cast<std::size_t>(i)] == 1 ? 1 : 0;
      sum[k] += x(i, j);
      n[k] += 1;
    }
    const double mean[2] = {sum[0] / n[0], sum[1] / n[1]};
    double ss[2] = {0, 0};
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int k = labels[static_cast<std::size_t>(i)] == 1 ? 1 : 0;
      ss[k] += (x(i, j) - mean[k]) * (x(i, j) - mean[k]);
    }
    const double var[2] = {ss[0] / (n[0] - 1), ss[1] / (n[1] - 1)};
    out[static_cast<std::size_t>(j)] = std::abs(mean[1] - mean[0]) / std::sqrt(var[1] / n[1] + var[0] / n[0]);
  }
  return out;
}

/// Indices sorted by descending score, ties by ascending index.
inline std::vector<Eigen::Index> descending_order(const std::vector<double> & scores)
{
  std::vector<Eigen::Index> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double sa = scores[static_cast<std::size_t>(a)];
    const double sb = scores[static_cast<std::size_t>(b)];
    return sa != sb ? sa > sb : a < b;
  });
  return idx;
}

/// Pairwise concordance: P(score_pos > score_neg) + 0.5 P(tie), in percent.
inline double mann_whitney_auc(const std::vector<double> & scores, const std::vector<int> & labels)
{
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] == 1) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return 100.0 * wins / pairs;
}

/// Gradient magnitude/orientation per pixel with clamped neighbours.
inline std::pair<ImageD, ImageD> gradient_brute_force(const ImageD & img)
{
  const Eigen::Index rows = img.rows();
  const Eigen::Index cols = img.cols();
  ImageD mag(rows, cols);
  ImageD ang(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double dx = img(r, std::min(c + 1, cols - 1)) - img(r, std::max<Eigen::Index>(c - 1, 0));
      const double dy = img(std::min(r + 1, rows - 1), c) - img(std::max<Eigen::Index>(r - 1, 0), c);
      mag(r, c) = std::sqrt(dx * dx + dy * dy);
      double a = std::atan2(dy, dx);
      if (a < 0) a += std::numbers::pi;
      if (a >= std::numbers::pi) a -= std::numbers::pi;
      ang(r, c) = (dx == 0 && dy == 0) ? 0.0 : a;
    }
  }
  return {mag, ang};
}

/// Per-pixel histogram accumulation; bin(theta) supplied by the caller.
template <typename BinFn>
FeatureMatrix cell_histograms_brute_force(const ImageD & mag, const ImageD & ang, int cells, int bins, BinFn bin)
{
  FeatureMatrix h = FeatureMatrix::Zero(cells * cells, bins);
  const Eigen::Index ch = mag.rows() / cells;
  const Eigen::Index cw = mag.cols() / cells;
  for (int cy = 0; cy < cells; ++cy) {
    for (int cx = 0; cx < cells; ++cx) {
      for (Eigen::Index r = cy * ch; r < (cy + 1) * ch; ++r) {
        for (Eigen::Index c = cx * cw; c < (cx + 1) * cw; ++c) {
          h(cy * cells + cx, bin(ang(r, c))) += mag(r, c);
        }
      }
    }
  }
  return h;
}

/// Global histogram equalization with an inclusive CDF (single tile, no clipping).
inline ImageD equalize(const ImageD & img, int bins)
{
  std::vector<double> count(static_cast<std::size_t>(bins), 0.0);
  auto bin_of = [bins](double v) { return std::min(bins - 1, static_cast<int>(std::clamp(v, 0.0, 1.0) * bins)); };
  for (Eigen::Index i = 0; i < img.size(); ++i) {
    count[static_cast<std::size_t>(bin_of(img.data()[i]))] += 1.0;
  }
  ImageD out(img.rows(), img.cols());
  for (Eigen::Index i = 0; i < img.size(); ++i) {
    double cdf = 0.0;
    for (int b = 0; b <= bin_of(img.data()[i]); ++b) {
      cdf += count[static_cast<std::size_t>(b)];
    }
    out.data()[i] = cdf / static_cast<double>(img.size());
  }
  return out;
}

}  // namespace texdesc::oracle

#endif  // TESTS__ORACLES_HPP_
