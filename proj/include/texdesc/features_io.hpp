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

#ifndef TEXDESC__FEATURES_IO_HPP_
#define TEXDESC__FEATURES_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "texdesc/types.hpp"

namespace texdesc
{

/// CSV with header `id,f0,...,f{L-1}`; values printed with 17 significant
/// digits so they read back exactly.
void write_feature_csv(
  const std::filesystem::path & path, const std::vector<std::string> & ids, const FeatureMatrix & features);

struct LabeledFeatures
{
  std::vector<std::string> ids;
  FeatureMatrix features;
};

LabeledFeatures read_feature_csv(const std::filesystem::path & path);

/// Binary container: "TXD1", u32 rows, u32 cols, then rows*cols
/// little-endian f64 in row-major order.
void write_feature_binary(const std::filesystem::path & path, const FeatureMatrix & features);
FeatureMatrix read_feature_binary(const std::filesystem::path & path);

}  // namespace texdesc

#endif  // TEXDESC__FEATURES_IO_HPP_
