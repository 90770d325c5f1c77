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

#ifndef TEXDESC__DESCRIPTOR_HPP_
#define TEXDESC__DESCRIPTOR_HPP_

#include <optional>
#include <string>

#include "texdesc/enhance.hpp"
#include "texdesc/hox.hpp"
#include "texdesc/parallel.hpp"
#include "texdesc/patchio.hpp"
#include "texdesc/pbdct.hpp"

namespace texdesc
{

/// Everything that determines a feature vector from a raw patch.
struct DescriptorConfig
{
  DescriptorTag tag = DescriptorTag::HOT;
  double sigma = 1.0;             // HOT only
  double keep_fraction = 0.5;     // PBDCT only
  HistogramConfig histogram{};    // HOG and HOT
  ResponseRule response_rule = ResponseRule::min_real;  // HOT only
  bool enhance = true;

  /// Canonical text covering only the fields relevant to `tag`.
  std::string canonical() const
  {
    std::string text = std::string(to_string(tag)) + ";enhance=" + (enhance ? "1" : "0");
    switch (tag) {
      case DescriptorTag::HOG:
        text += ";" + histogram.canonical();
        break;
      case DescriptorTag::HOT:
        text += ";sigma=" + exact(sigma) + ";" + histogram.canonical() + ";rule=" +
                std::string(to_string(response_rule));
        break;
      case DescriptorTag::PBDCT:
        text += ";keep=" + exact(keep_fraction);
        break;
    }
    return text;
  }

  std::string digest() const { return fnv1a_hex(canonical()); }

  Eigen::Index length(Eigen::Index rows = kPatchSide, Eigen::Index cols = kPatchSide) const
  {
    if (tag == DescriptorTag::PBDCT) {
      return static_cast<Eigen::Index>(band_mask(rows, cols, keep_fraction).pool_size());
    }
    return histogram.descriptor_length();
  }
};

inline DescriptorTag parse_descriptor_tag(std::string_view token)
{
  if (token == "hog" || token == "HOG") return DescriptorTag::HOG;
  if (token == "hot" || token == "HOT") return DescriptorTag::HOT;
  if (token == "pbdct" || token == "PBDCT") return DescriptorTag::PBDCT;
  throw ParseError("unknown descriptor \"" + std::string(token) + "\"");
}

/// Normalize, optionally enhance, then extract. The resulting digest covers
/// the whole configuration including enhancement.
inline FeatureVector extract_features(const ImagePatch & patch, const DescriptorConfig & cfg)
{
  const ImagePatch prepared = enhance(patch, cfg.enhance);
  FeatureVector fv;
  switch (cfg.tag) {
    case DescriptorTag::HOG:
      fv = extract_hog(prepared, cfg.histogram);
      break;
    case DescriptorTag::HOT:
      fv = extract_hot(prepared, cfg.sigma, cfg.histogram, cfg.response_rule);
      break;
    case DescriptorTag::PBDCT:
      fv = extract_pbdct(prepared, band_mask(prepared.rows(), prepared.cols(), cfg.keep_fraction));
      break;
  }
  fv.params_digest = cfg.digest();
  return fv;
}

/// One row per record, rows in dataset order.
inline FeatureMatrix extract_matrix(const Dataset & dataset, const DescriptorConfig & cfg)
{
  if (dataset.empty()) {
    return FeatureMatrix(0, 0);
  }
  std::vector<Eigen::VectorXd> rows(dataset.size());
  parallel_for(dataset.size(), [&](std::size_t i) {
    rows[i] = extract_features(dataset.records[i].patch, cfg).values;
  });
  FeatureMatrix out(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return out;
}

}  // namespace texdesc

#endif  // TEXDESC__DESCRIPTOR_HPP_
