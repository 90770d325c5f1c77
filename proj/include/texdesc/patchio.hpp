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

#ifndef TEXDESC__PATCHIO_HPP_
#define TEXDESC__PATCHIO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "texdesc/types.hpp"

namespace texdesc
{

struct PatchRecord
{
  std::string id;
  ImagePatch patch;
  Density density = Density::d;
  Label label = Label::normal;
};

/// Ordered, immutable-after-load collection of patch records.
struct Dataset
{
  std::vector<PatchRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
};

/// Decode an 8-bit grayscale PNG or PGM (P2/P5) into [0,255] intensities.
ImageD read_image_8bit(const std::filesystem::path & path);

/// Write intensities in [0,1] as 8-bit grayscale; codec chosen by extension
/// (.png, otherwise PGM P5).
void write_image_8bit(const std::filesystem::path & path, const ImageD & unit_image);

/// Bilinear resampling with pixel-centre alignment.
ImageD resize_bilinear(const ImageD & image, Eigen::Index rows, Eigen::Index cols);

/// Parse a `path,density,label` CSV manifest. Paths are resolved relative to
/// the manifest directory; the path string as written becomes the record id.
/// Images are resized to 128x128 when needed and scaled to [0,1] by /255.
Dataset load_manifest(const std::filesystem::path & manifest);

/// Write every record's image to `dir / id` and a manifest listing them.
/// Returns the manifest path.
std::filesystem::path write_dataset(const Dataset & dataset, const std::filesystem::path & dir);

Dataset density_slice(const Dataset & dataset, DensitySelector selector);

}  // namespace texdesc

#endif  // TEXDESC__PATCHIO_HPP_
