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

#ifndef TEXDESC__TYPES_HPP_
#define TEXDESC__TYPES_HPP_

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "texdesc/error.hpp"

namespace texdesc
{

/// Dense row-major image, indexed (row, col) = (y, x).
template <typename Scalar>
using Image = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ImageD = Image<double>;

/// Sample-by-feature matrix, one row per patch.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Working patch side used throughout the pipeline.
inline constexpr Eigen::Index kPatchSide = 128;

/// A validated grayscale patch: at least 3x3 and every intensity finite.
class ImagePatch
{
public:
  ImagePatch() = default;
  explicit ImagePatch(ImageD pixels) : pixels_(std::move(pixels))
  {
    if (pixels_.rows() < 3 || pixels_.cols() < 3) {
      throw DomainError(
        "patch must be at least 3x3, got " + std::to_string(pixels_.rows()) + "x" +
        std::to_string(pixels_.cols()));
    }
    if (!pixels_.allFinite()) {
      throw DomainError("patch contains non-finite intensities");
    }
  }

  const ImageD & pixels() const noexcept { return pixels_; }
  Eigen::Index rows() const noexcept { return pixels_.rows(); }
  Eigen::Index cols() const noexcept { return pixels_.cols(); }

private:
  ImageD pixels_;
};

enum class Density { d, e, f, g };
enum class DensitySelector { d, e, f, g, all };
enum class Label { normal, benign, malignant };

std::string_view to_string(Density density);
std::string_view to_string(DensitySelector density);
std::string_view to_string(Label label);

/// Throw ParseError naming the token on failure.
Density parse_density(std::string_view token);
DensitySelector parse_density_selector(std::string_view token);
Label parse_label(std::string_view token);

inline bool matches(DensitySelector sel, Density density)
{
  return sel == DensitySelector::all || static_cast<int>(sel) == static_cast<int>(density);
}

}  // namespace texdesc

#endif  // TEXDESC__TYPES_HPP_
