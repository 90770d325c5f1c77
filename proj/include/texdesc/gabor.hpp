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

#ifndef TEXDESC__GABOR_HPP_
#define TEXDESC__GABOR_HPP_

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "texdesc/types.hpp"

namespace texdesc
{

/// Per-pixel (magnitude, orientation) pair; orientations lie in [0, pi).
template <typename Scalar>
struct ResponseField
{
  Image<Scalar> magnitude;
  Image<Scalar> orientation;
};

/// How the eight oriented responses collapse to one magnitude/orientation.
/// `min_real` is the signed minimum (and its argmin); `max_abs` is kept for
/// ablation.
enum class ResponseRule { min_real, max_abs };

inline std::string_view to_string(ResponseRule rule)
{
  return rule == ResponseRule::min_real ? "min_real" : "max_abs";
}

inline ResponseRule parse_response_rule(std::string_view token)
{
  if (token == "min_real") return ResponseRule::min_real;
  if (token == "max_abs") return ResponseRule::max_abs;
  throw ParseError("unknown response rule \"" + std::string(token) + "\"");
}

struct GaborParams
{
  double sigma = 1.0;
  double mu = 0.0;
  int orientations = 8;
  int kernel_radius = 2;

  /// sigma with mu = 1/sqrt(2 sigma) and radius = max(2, round(3 sigma)).
  static GaborParams from_sigma(double sigma)
  {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw DomainError("Gabor sigma must be positive, got " + std::to_string(sigma));
    }
    GaborParams params;
    params.sigma = sigma;
    params.mu = 1.0 / std::sqrt(2.0 * sigma);
    params.kernel_radius = std::max(2, static_cast<int>(std::lround(3.0 * sigma)));
    return params;
  }

  /// Orientation of filter t (0-based): pi * t / T.
  double theta(int t) const { return std::numbers::pi * t / orientations; }
};

/// Real part of the complex Gabor function at offset (x, y) = (col, row).
inline double gabor_real(double x, double y, double theta, double mu, double sigma)
{
  const double envelope =
    1.0 / (2.0 * std::numbers::pi * sigma * sigma) * std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
  return envelope * std::cos(2.0 * std::numbers::pi * (mu * x * std::cos(theta) + mu * y * std::sin(theta)));
}

/// Square kernels of side 2*radius+1, element (r, c) holding the filter at
/// offset (x, y) = (c - radius, r - radius). No DC correction.
template <typename Scalar = double>
std::vector<Image<Scalar>> build_bank(const GaborParams & params)
{
  if (!(params.sigma > 0.0)) {
    throw DomainError("Gabor sigma must be positive");
  }
  const int radius = params.kernel_radius;
  const int side = 2 * radius + 1;
  std::vector<Image<Scalar>> bank;
  bank.reserve(static_cast<std::size_t>(params.orientations));
  for (int t = 0; t < params.orientations; ++t) {
    Image<Scalar> kernel(side, side);
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) {
        kernel(r, c) = static_cast<Scalar>(
          gabor_real(c - radius, r - radius, params.theta(t), params.mu, params.sigma));
      }
    }
    bank.push_back(std::move(kernel));
  }
  return bank;
}

template <typename Scalar = double>
std::vector<Image<Scalar>> build_bank(double sigma)
{
  return build_bank<Scalar>(GaborParams::from_sigma(sigma));
}

/// Border-replicated copy of `image` grown by `pad` on each side.
template <typename Derived>
Image<typename Derived::Scalar> replicate_pad(const Eigen::MatrixBase<Derived> & image, Eigen::Index pad)
{
  const Eigen::Index rows = image.rows();
  const Eigen::Index cols = image.cols();
  Image<typename Derived::Scalar> out(rows + 2 * pad, cols + 2 * pad);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const Eigen::Index sr = std::clamp<Eigen::Index>(r - pad, 0, rows - 1);
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      out(r, c) = image(sr, std::clamp<Eigen::Index>(c - pad, 0, cols - 1));
    }
  }
  return out;
}

/// Same-size convolution with replicate padding:
/// out(y, x) = sum_{dy, dx} k(dy, dx) * I(y - dy, x - dx), taps visited in
/// row-major kernel order.
template <typename Derived, typename KernelDerived>
Image<typename Derived::Scalar> convolve_same(
  const Eigen::MatrixBase<Derived> & image, const Eigen::MatrixBase<KernelDerived> & kernel)
{
  using Scalar = typename Derived::Scalar;
  const Eigen::Index radius = kernel.rows() / 2;
  const Image<Scalar> padded = replicate_pad(image, radius);
  Image<Scalar> out = Image<Scalar>::Zero(image.rows(), image.cols());
  for (Eigen::Index kr = 0; kr < kernel.rows(); ++kr) {
    for (Eigen::Index kc = 0; kc < kernel.cols(); ++kc) {
      const Eigen::Index dy = kr - radius;
      const Eigen::Index dx = kc - radius;
      out.noalias() += kernel(kr, kc) * padded.block(radius - dy, radius - dx, image.rows(), image.cols());
    }
  }
  return out;
}

/// Per-pixel collapse of the oriented filter responses. Ties go to the
/// smallest orientation index.
template <typename Derived>
ResponseField<typename Derived::Scalar> gabor_response(
  const Eigen::MatrixBase<Derived> & image, const GaborParams & params,
  ResponseRule rule = ResponseRule::min_real)
{
  using Scalar = typename Derived::Scalar;
  const auto bank = build_bank<Scalar>(params);
  ResponseField<Scalar> field;
  field.orientation = Image<Scalar>::Zero(image.rows(), image.cols());
  for (int t = 0; t < params.orientations; ++t) {
    Image<Scalar> response = convolve_same(image, bank[static_cast<std::size_t>(t)]);
    if (rule == ResponseRule::max_abs) {
      response = response.cwiseAbs();
    }
    if (t == 0) {
      field.magnitude = std::move(response);
      continue;
    }
    const auto theta = static_cast<Scalar>(params.theta(t));
    for (Eigen::Index i = 0; i < response.size(); ++i) {
      const Scalar candidate = response.data()[i];
      Scalar & best = field.magnitude.data()[i];
      const bool better = rule == ResponseRule::min_real ? candidate < best : candidate > best;
      if (better) {
        best = candidate;
        field.orientation.data()[i] = theta;
      }
    }
  }
  return field;
}

template <typename Derived>
ResponseField<typename Derived::Scalar> gabor_response(
  const Eigen::MatrixBase<Derived> & image, double sigma, ResponseRule rule = ResponseRule::min_real)
{
  return gabor_response(image, GaborParams::from_sigma(sigma), rule);
}

/// Fold an angle from atan2 into [0, pi).
inline double fold_orientation(double angle)
{
  if (angle < 0.0) {
    angle += std::numbers::pi;
  }
  if (angle >= std::numbers::pi) {
    angle -= std::numbers::pi;
  }
  return angle;
}

/// Central differences with replicated borders; x runs along columns and y
/// along rows.
template <typename Derived>
ResponseField<typename Derived::Scalar> gradient_response(const Eigen::MatrixBase<Derived> & image)
{
  using Scalar = typename Derived::Scalar;
  const Eigen::Index rows = image.rows();
  const Eigen::Index cols = image.cols();
  ResponseField<Scalar> field{Image<Scalar>(rows, cols), Image<Scalar>(rows, cols)};
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index up = std::max<Eigen::Index>(r - 1, 0);
    const Eigen::Index down = std::min<Eigen::Index>(r + 1, rows - 1);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Eigen::Index left = std::max<Eigen::Index>(c - 1, 0);
      const Eigen::Index right = std::min<Eigen::Index>(c + 1, cols - 1);
      const Scalar dx = image(r, right) - image(r, left);
      const Scalar dy = image(down, c) - image(up, c);
      field.magnitude(r, c) = std::sqrt(dx * dx + dy * dy);
      if (dx == Scalar(0) && dy == Scalar(0)) {
        field.orientation(r, c) = Scalar(0);
      } else {
        field.orientation(r, c) = static_cast<Scalar>(fold_orientation(std::atan2(dy, dx)));
      }
    }
  }
  return field;
}

}  // namespace texdesc

#endif  // TEXDESC__GABOR_HPP_
