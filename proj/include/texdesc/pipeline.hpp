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

#ifndef TEXDESC__PIPELINE_HPP_
#define TEXDESC__PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "texdesc/descriptor.hpp"
#include "texdesc/dpselect.hpp"
#include "texdesc/patchio.hpp"
#include "texdesc/svm.hpp"

namespace texdesc
{

enum class Stage { normal_abnormal, benign_malignant };

std::string_view to_string(Stage stage);
Stage parse_stage(std::string_view token);

/// Positive class per stage: abnormal (stage 1), malignant (stage 2).
/// Returns nullopt for records outside the stage (normal in stage 2).
std::optional<int> stage_label(Stage stage, Label label);

struct SelectionConfig
{
  SearchOptions search{};
  int inner_repeats = 3;
  DpFormula formula = DpFormula::welch;
};

struct TrainingConfig
{
  DescriptorConfig descriptor{};
  SvmParams svm{};
  SelectionConfig selection{};
};

struct StageModel
{
  Stage stage = Stage::normal_abnormal;
  DescriptorConfig descriptor{};
  std::vector<Eigen::Index> selected_indices;
  SvmModel svm;
};

struct PipelineBundle
{
  DensitySelector density = DensitySelector::all;
  TrainingConfig config{};
  StageModel stage1;
  std::optional<StageModel> stage2;
  std::vector<std::string> warnings;
};

/// DP ranking, inner-CV subset search and SVM training on one stage's
/// training rows. `features` rows align with `labels`.
StageModel train_stage(const Eigen::Ref<const FeatureMatrix> & features, std::span<const int> labels, Stage stage,
                       const TrainingConfig & config, std::uint64_t seed);

/// Columns `indices` of `features`.
FeatureMatrix select_columns(const Eigen::Ref<const FeatureMatrix> & features,
                             std::span<const Eigen::Index> indices);

/// Called for every record whose pixels are used during training.
using RecordObserver = std::function<void(const PatchRecord &)>;

PipelineBundle train_pipeline(const Dataset & dataset, DensitySelector density, const TrainingConfig & config,
                              std::uint64_t seed, const RecordObserver & observer = {});

/// `abnormal` is emitted when stage 1 fires but no stage-2 model exists.
enum class PredictedLabel { normal, benign, malignant, abnormal };
std::string_view to_string(PredictedLabel label);

struct Classification
{
  PredictedLabel label = PredictedLabel::normal;
  double stage1_score = 0.0;
  std::optional<double> stage2_score;
};

Classification classify(const PipelineBundle & bundle, const ImagePatch & patch);

/// Classify an already-extracted vector; its digest must match the bundle.
Classification classify(const PipelineBundle & bundle, const FeatureVector & features);

/// "TXPB", u16 version, u32 header length, JSON header, u64 value count,
/// little-endian f64 payload.
inline constexpr std::uint16_t kBundleVersion = 1;

std::string serialize_bundle(const PipelineBundle & bundle);
PipelineBundle deserialize_bundle(std::string_view blob);
void save_bundle(const PipelineBundle & bundle, const std::filesystem::path & path);
PipelineBundle load_bundle(const std::filesystem::path & path);

}  // namespace texdesc

#endif  // TEXDESC__PIPELINE_HPP_
