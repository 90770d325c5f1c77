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

#include "texdesc/dpselect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <json.hpp>

#include "texdesc/random.hpp"

namespace texdesc
{

namespace
{

ClassStats class_stats(const Eigen::Ref<const FeatureMatrix> & features, std::span<const int> labels, int which)
{
  ClassStats stats;
  stats.mean = Eigen::VectorXd::Zero(features.cols());
  stats.stddev = Eigen::VectorXd::Zero(features.cols());
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    if ((labels[static_cast<std::size_t>(r)] != 0) == (which != 0)) {
      stats.mean += features.row(r).transpose();
      ++stats.count;
    }
  }
  if (stats.count == 0) {
    return stats;
  }
  stats.mean /= static_cast<double>(stats.count);
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    if ((labels[static_cast<std::size_t>(r)] != 0) == (which != 0)) {
      stats.stddev += (features.row(r).transpose() - stats.mean).cwiseAbs2();
    }
  }
  if (stats.count > 1) {
    stats.stddev = (stats.stddev / static_cast<double>(stats.count - 1)).cwiseSqrt();
  }
  return stats;
}

}  // namespace

DpRanking dp_scores(const Eigen::Ref<const FeatureMatrix> & features, std::span<const int> labels,
                    DpFormula formula)
{
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    throw ConfigError("label count does not match feature rows");
  }
  if (!features.allFinite()) {
    throw DomainError("feature matrix contains non-finite values");
  }
  DpRanking ranking;
  ranking.positive = class_stats(features, labels, 1);
  ranking.negative = class_stats(features, labels, 0);
  if (ranking.positive.count < 2) {
    throw StatisticsError("class a (positive) has " + std::to_string(ranking.positive.count) +
                          " samples; DP needs at least 2");
  }
  if (ranking.negative.count < 2) {
    throw StatisticsError("class b (negative) has " + std::to_string(ranking.negative.count) +
                          " samples; DP needs at least 2");
  }

  const auto na = static_cast<double>(ranking.positive.count);
  const auto nb = static_cast<double>(ranking.negative.count);
  const Eigen::Index k_count = features.cols();
  ranking.scores.resize(k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const double va = ranking.positive.stddev(k) * ranking.positive.stddev(k) / na;
    const double vb = ranking.negative.stddev(k) * ranking.negative.stddev(k) / nb;
    const double diff = ranking.positive.mean(k) - ranking.negative.mean(k);
    double score;
    if (formula == DpFormula::welch) {
      const double numerator = std::abs(diff);
      const double denominator = std::sqrt(va + vb);
      if (denominator > 0.0) {
        score = numerator / denominator;
      } else {
        score = numerator == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
    } else {
      const double radicand = va - vb;
      if (radicand > 0.0) {
        score = diff / std::sqrt(radicand);
      } else if (radicand == 0.0) {
        score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
      } else {
        score = -std::numeric_limits<double>::infinity();
      }
    }
    ranking.scores(k) = score;
  }
  ranking.order.resize(static_cast<std::size_t>(k_count));
  std::iota(ranking.order.begin(), ranking.order.end(), Eigen::Index{0});
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return ranking.scores(a) > ranking.scores(b); });
  return ranking;
}

SubsetSearchResult incremental_select(const DpRanking & ranking, SubsetEvaluator & evaluator,
                                      SearchOptions options)
{
  const std::size_t available = ranking.order.size();
  if (available < options.min_size || options.min_size == 0) {
    throw SelectionError("incremental selection needs at least " + std::to_string(options.min_size) +
                         " features, got " + std::to_string(available));
  }
  std::size_t cap = options.cap == 0 ? std::min<std::size_t>(available, 5200) : options.cap;
  if (cap > available) {
    throw SelectionError("selection cap " + std::to_string(cap) + " exceeds feature count " +
                         std::to_string(available));
  }
  cap = std::max(cap, options.min_size);

  SubsetSearchResult result;
  double best = -1.0;
  const std::span<const Eigen::Index> order(ranking.order);
  for (std::size_t size = options.min_size; size <= cap; ++size) {
    const double accuracy = evaluator.evaluate(order.first(size));
    result.curve.emplace_back(size, accuracy);
    if (accuracy > best) {
      best = accuracy;
      result.chosen_size = size;
    }
    if (accuracy >= 100.0) {
      break;
    }
  }
  result.selected_indices.assign(ranking.order.begin(),
                                 ranking.order.begin() + static_cast<std::ptrdiff_t>(result.chosen_size));
  return result;
}

SubsetSearchResult incremental_select(
  const DpRanking & ranking, const std::function<double(std::span<const Eigen::Index>)> & evaluator,
  SearchOptions options)
{
  struct Adapter : SubsetEvaluator
  {
    const std::function<double(std::span<const Eigen::Index>)> & fn;
    explicit Adapter(const std::function<double(std::span<const Eigen::Index>)> & f) : fn(f) {}
    double evaluate(std::span<const Eigen::Index> subset) override { return fn(subset); }
  } adapter(evaluator);
  return incremental_select(ranking, adapter, options);
}

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> stratified_halves(
  std::span<const int> strata, std::uint64_t seed)
{
  std::map<int, std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    groups[strata[i]].push_back(static_cast<Eigen::Index>(i));
  }
  Rng rng(seed);
  std::vector<Eigen::Index> first;
  std::vector<Eigen::Index> second;
  // Alternate which half receives the odd member so totals stay balanced.
  bool first_gets_extra = true;
  for (auto & [stratum, members] : groups) {
    shuffle(members, rng);
    for (std::size_t k = 0; k < members.size(); ++k) {
      const bool to_first = (k % 2 == 0) == first_gets_extra;
      (to_first ? first : second).push_back(members[k]);
    }
    if (members.size() % 2 == 1) {
      first_gets_extra = !first_gets_extra;
    }
  }
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {first, second};
}

InnerCvEvaluator::InnerCvEvaluator(const Eigen::Ref<const FeatureMatrix> & features, std::span<const int> labels,
                                   const SvmParams & params, std::uint64_t seed, int repeats)
: features_(features), labels_(labels.begin(), labels.end()), params_(params)
{
  if (static_cast<Eigen::Index>(labels_.size()) != features_.rows()) {
    throw ConfigError("label count does not match feature rows");
  }
  long positives = std::count_if(labels_.begin(), labels_.end(), [](int v) { return v != 0; });
  long negatives = static_cast<long>(labels_.size()) - positives;
  if (positives < 2 || negatives < 2) {
    throw SelectionError("inner cross-validation needs at least 2 samples per class");
  }
  for (int rep = 0; rep < repeats; ++rep) {
    auto [a, b] = stratified_halves(labels_, mix_seed(seed, static_cast<std::uint64_t>(rep)));
    for (int fold = 0; fold < 2; ++fold) {
      Split split;
      split.train = fold == 0 ? a : b;
      split.test = fold == 0 ? b : a;
      for (auto row : split.train) {
        split.train_signs.push_back(labels_[static_cast<std::size_t>(row)] ? 1 : -1);
      }
      splits_.push_back(std::move(split));
    }
  }
  reset();
}

void InnerCvEvaluator::reset()
{
  current_.clear();
  for (auto & split : splits_) {
    const auto ntr = static_cast<Eigen::Index>(split.train.size());
    const auto nte = static_cast<Eigen::Index>(split.test.size());
    split.train_gram = Eigen::MatrixXd::Zero(ntr, ntr);
    split.cross_gram = Eigen::MatrixXd::Zero(nte, ntr);
  }
}

void InnerCvEvaluator::add_feature(Eigen::Index feature)
{
  const bool linear = params_.kernel.type == KernelType::linear;
  for (auto & split : splits_) {
    const auto ntr = static_cast<Eigen::Index>(split.train.size());
    const auto nte = static_cast<Eigen::Index>(split.test.size());
    Eigen::VectorXd train_col(ntr);
    Eigen::VectorXd test_col(nte);
    for (Eigen::Index i = 0; i < ntr; ++i) {
      train_col(i) = features_(split.train[static_cast<std::size_t>(i)], feature);
    }
    for (Eigen::Index i = 0; i < nte; ++i) {
      test_col(i) = features_(split.test[static_cast<std::size_t>(i)], feature);
    }
    // Standardize with training-half statistics, as train_svm would.
    const double mean = train_col.mean();
    const double sd = std::sqrt((train_col.array() - mean).square().sum() / static_cast<double>(ntr));
    const double scale = sd > 1e-12 ? sd : 1.0;
    train_col = ((train_col.array() - mean) / scale).matrix();
    test_col = ((test_col.array() - mean) / scale).matrix();
    if (linear) {
      split.train_gram.noalias() += train_col * train_col.transpose();
      split.cross_gram.noalias() += test_col * train_col.transpose();
    } else {
      for (Eigen::Index c = 0; c < ntr; ++c) {
        split.train_gram.col(c).array() += (train_col.array() - train_col(c)).square();
        split.cross_gram.col(c).array() += (test_col.array() - train_col(c)).square();
      }
    }
  }
  current_.push_back(feature);
}

double InnerCvEvaluator::score_splits(std::size_t feature_count)
{
  const bool linear = params_.kernel.type == KernelType::linear;
  const double gamma =
    params_.kernel.gamma > 0.0 ? params_.kernel.gamma : 1.0 / static_cast<double>(feature_count);
  double total = 0.0;
  for (const auto & split : splits_) {
    const auto ntr = static_cast<Eigen::Index>(split.train.size());
    Eigen::MatrixXd train_k;
    Eigen::MatrixXd cross_k;
    if (linear) {
      train_k = split.train_gram;
      cross_k = split.cross_gram;
    } else {
      train_k = (-gamma * split.train_gram.array()).exp().matrix();
      cross_k = (-gamma * split.cross_gram.array()).exp().matrix();
    }
    const DualSolution sol =
      solve_dual(train_k, split.train_signs, params_.C, params_.tol, params_.max_passes * ntr);
    Eigen::VectorXd coeffs(ntr);
    for (Eigen::Index t = 0; t < ntr; ++t) {
      coeffs(t) = sol.alpha(t) * split.train_signs[static_cast<std::size_t>(t)];
    }
    const Eigen::VectorXd raw = (cross_k * coeffs).array() + sol.bias;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
      const bool predicted = raw(static_cast<Eigen::Index>(i)) >= 0.0;
      correct += predicted == (labels_[static_cast<std::size_t>(split.test[i])] != 0) ? 1 : 0;
    }
    total += 100.0 * static_cast<double>(correct) / static_cast<double>(split.test.size());
  }
  return total / static_cast<double>(splits_.size());
}

double InnerCvEvaluator::evaluate(std::span<const Eigen::Index> subset)
{
  const bool extends = subset.size() >= current_.size() &&
                       std::equal(current_.begin(), current_.end(), subset.begin());
  if (!extends) {
    reset();
  }
  for (std::size_t k = current_.size(); k < subset.size(); ++k) {
    if (subset[k] < 0 || subset[k] >= features_.cols()) {
      throw ConfigError("subset index out of range");
    }
    add_feature(subset[k]);
  }
  return score_splits(subset.size());
}

std::string selection_report(const DpRanking & ranking, const SubsetSearchResult & result)
{
  nlohmann::ordered_json report;
  report["format"] = "texdesc-selection";
  report["version"] = 1;
  report["feature_count"] = ranking.order.size();
  report["chosen_size"] = result.chosen_size;
  report["selected_indices"] = result.selected_indices;
  nlohmann::ordered_json scores = nlohmann::ordered_json::array();
  for (auto index : result.selected_indices) {
    const double s = ranking.scores(index);
    scores.push_back(std::isfinite(s) ? nlohmann::ordered_json(s) : nlohmann::ordered_json(s > 0 ? "inf" : "-inf"));
  }
  report["selected_scores"] = scores;
  nlohmann::ordered_json curve = nlohmann::ordered_json::array();
  for (const auto & [size, accuracy] : result.curve) {
    curve.push_back({{"size", size}, {"accuracy", accuracy}});
  }
  report["accuracy_curve"] = curve;
  return report.dump(2) + "\n";
}

}  // namespace texdesc
