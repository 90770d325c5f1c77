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

#ifndef TEXDESC__DPSELECT_HPP_
#define TEXDESC__DPSELECT_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "texdesc/svm.hpp"
#include "texdesc/types.hpp"

namespace texdesc
{

/// `welch` is |mu_a - mu_b| / sqrt(var_a/n_a + var_b/n_b). `printed` keeps
/// the signed numerator and a minus under the root; negative radicands rank
/// last.
enum class DpFormula { welch, printed };

inline std::string_view to_string(DpFormula formula)
{
  return formula == DpFormula::welch ? "welch" : "printed";
}

inline DpFormula parse_dp_formula(std::string_view token)
{
  if (token == "welch") return DpFormula::welch;
  if (token == "printed") return DpFormula::printed;
  throw ParseError("unknown DP formula \"" + std::string(token) + "\"");
}

struct ClassStats
{
  Eigen::VectorXd mean;
  /// Sample standard deviation (n - 1 denominator).
  Eigen::VectorXd stddev;
  Eigen::Index count = 0;
};

struct DpRanking
{
  /// One score per feature; +inf marks perfect separation with zero spread.
  Eigen::VectorXd scores;
  /// Feature indices by descending score, ties by ascending index.
  std::vector<Eigen::Index> order;
  ClassStats positive;
  ClassStats negative;
};

/// Positive class (label 1) is class a, negative class b.
DpRanking dp_scores(const Eigen::Ref<const FeatureMatrix> & features, std::span<const int> labels,
                    DpFormula formula = DpFormula::welch);

/// Scores a feature subset (a prefix of a ranking) as an accuracy in %.
/// Calls arrive with prefixes growing by one feature, which implementations
/// may exploit.
class SubsetEvaluator
{
public:
  virtual ~SubsetEvaluator() = default;
  virtual double evaluate(std::span<const Eigen::Index> subset) = 0;
};

struct SubsetSearchResult
{
  std::vector<Eigen::Index> selected_indices;
  /// (subset size, accuracy %) for every evaluated size.
  std::vector<std::pair<std::size_t, double>> curve;
  std::size_t chosen_size = 0;
};

struct SearchOptions
{
  std::size_t min_size = 5;
  /// Largest prefix evaluated; 0 means min(feature_count, 5200).
  std::size_t cap = 0;
};

/// Evaluate prefixes of `ranking.order` of sizes min_size, min_size+1, ...,
/// cap and keep the most accurate (smallest size on ties). The sweep stops
/// early once a prefix scores 100%, since no larger prefix can then win.
SubsetSearchResult incremental_select(const DpRanking & ranking, SubsetEvaluator & evaluator,
                                      SearchOptions options = {});

SubsetSearchResult incremental_select(
  const DpRanking & ranking, const std::function<double(std::span<const Eigen::Index>)> & evaluator,
  SearchOptions options = {});

/// Stratified 2-fold cross-validation accuracy of an SVM restricted to the
/// subset, averaged over `repeats` seeded splits. Rows are the training
/// data only. Prefix growth is incremental: per split, the Gram matrices
/// gain one standardized rank-1 term per added feature.
class InnerCvEvaluator : public SubsetEvaluator
{
public:
  InnerCvEvaluator(const Eigen::Ref<const FeatureMatrix> & features, std::span<const int> labels,
                   const SvmParams & params, std::uint64_t seed, int repeats = 3);

  double evaluate(std::span<const Eigen::Index> subset) override;

private:
  struct Split
  {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
    std::vector<int> train_signs;
    // Linear: accumulated inner products. RBF: accumulated squared distances.
    Eigen::MatrixXd train_gram;
    Eigen::MatrixXd cross_gram;
  };

  void reset();
  void add_feature(Eigen::Index feature);
  double score_splits(std::size_t feature_count);

  FeatureMatrix features_;
  std::vector<int> labels_;
  SvmParams params_;
  std::vector<Split> splits_;
  std::vector<Eigen::Index> current_;
};

/// Selection report as JSON text (stable key order).
std::string selection_report(const DpRanking & ranking, const SubsetSearchResult & result);

/// Stratified random halves: within each class, shuffled positions
/// alternate between the halves. Returns row indices of each half, each in
/// ascending order.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> stratified_halves(
  std::span<const int> strata, std::uint64_t seed);

}  // namespace texdesc

#endif  // TEXDESC__DPSELECT_HPP_
