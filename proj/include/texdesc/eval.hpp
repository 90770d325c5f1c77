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

#ifndef TEXDESC__EVAL_HPP_
#define TEXDESC__EVAL_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "texdesc/pipeline.hpp"

namespace texdesc
{

struct ConfusionCounts
{
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

/// Percentages; nullopt where the denominator is zero.
struct Metrics
{
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> accuracy;
};

Metrics metrics(const ConfusionCounts & counts);

struct RocPoint
{
  double threshold;
  double specificity;  // %
  double sensitivity;  // %
};

/// Threshold sweep from +inf through each distinct score (descending) to
/// -inf; a case is called positive when score >= threshold. Tied scores
/// move together as one step.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);

/// Trapezoidal area under the (specificity, sensitivity) sweep, in %.
/// nullopt when either class is missing.
std::optional<double> auc(std::span<const double> scores, std::span<const int> labels);
double auc_from_roc(std::span<const RocPoint> roc);

struct ProtocolConfig
{
  TrainingConfig training{};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
};

struct FoldResult
{
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<double> test_scores;
  std::vector<int> test_labels;
  ConfusionCounts counts;
  Metrics metrics;
  std::optional<double> auc;
  std::size_t selected_size = 0;
};

struct RepeatResult
{
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  /// Fold averages over defined values.
  Metrics metrics;
  std::optional<double> auc;
};

struct Aggregate
{
  std::optional<double> mean;
  std::optional<double> std;
  std::size_t count = 0;
  std::size_t undefined = 0;
};

enum class CellStatus { ok, absent, error };

struct CellResult
{
  DensitySelector density = DensitySelector::all;
  Stage stage = Stage::normal_abnormal;
  CellStatus status = CellStatus::ok;
  std::string note;
  std::vector<RepeatResult> repeats;
  Aggregate sensitivity;
  Aggregate specificity;
  Aggregate accuracy;
  Aggregate auc;
  /// Pooled over every repeat and fold.
  std::vector<RocPoint> roc;
};

struct EvaluationReport
{
  TrainingConfig config{};
  std::vector<std::uint64_t> seeds;
  std::vector<CellResult> cells;

  const CellResult * find(DensitySelector density, Stage stage) const;
  bool any_error() const;
};

/// Repeated stratified two-fold cross-validation per (density, stage) cell.
/// A cell is absent when a stage class has fewer than 4 records in the
/// slice, since each training half then needs 2 per class.
EvaluationReport cross_validate(const Dataset & dataset, std::span<const DensitySelector> densities,
                                const ProtocolConfig & protocol);

/// Report JSON with stable key order.
std::string report_text(const EvaluationReport & report);

/// Writes report.json plus roc_<density>_<stage>.csv for every evaluated
/// cell.
void emit_report(const EvaluationReport & report, const std::filesystem::path & dir);

}  // namespace texdesc

#endif  // TEXDESC__EVAL_HPP_
