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

#include <doctest.h>

#include <json.hpp>

#include "oracles.hpp"
#include "test_util.hpp"
#include "texdesc/dpselect.hpp"
#include "texdesc/error.hpp"

using namespace texdesc;

TEST_CASE("hand-computed DP value")
{
  FeatureMatrix x(5, 1);
  x << 1, 3, 0, 0, 0;
  const std::vector<int> labels{1, 1, 0, 0, 0};
  const auto ranking = dp_scores(x, labels);
  CHECK(ranking.scores(0) == doctest::Approx(2.0));
  CHECK(ranking.positive.count == 2);
  CHECK(ranking.positive.mean(0) == doctest::Approx(2.0));
  CHECK(ranking.negative.stddev(0) == 0.0);
}

TEST_CASE("constant feature scores zero, separated constants score infinity")
{
  FeatureMatrix x(4, 2);
  x << 1, 5, 1, 5, 1, 2, 1, 2;
  const std::vector<int> labels{1, 1, 0, 0};
  const auto ranking = dp_scores(x, labels);
  CHECK(ranking.scores(0) == 0.0);
  CHECK(std::isinf(ranking.scores(1)));
  CHECK(ranking.order.front() == 1);
}

TEST_CASE("DP ordering equals an independent Welch ordering")
{
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureMatrix x(50, 20);
    std::vector<int> labels(50);
    for (Eigen::Index i = 0; i < 50; ++i) {
      labels[static_cast<std::size_t>(i)] = i < 25 ? 1 : 0;
      for (Eigen::Index j = 0; j < 20; ++j) {
        x(i, j) = normal(rng) + (i < 25 ? 0.1 * static_cast<double>(j % 5) : 0.0);
      }
    }
    const auto ranking = dp_scores(x, labels);
    const auto reference = oracle::welch_abs_t(x, labels);
    CHECK(ranking.order == oracle::descending_order(reference));
    for (std::size_t j = 0; j < reference.size(); ++j) {
      CHECK(ranking.scores(static_cast<Eigen::Index>(j)) == doctest::Approx(reference[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("equal scores keep ascending index order")
{
  FeatureMatrix x(4, 3);
  x << 1, 1, 1, 2, 2, 2, 3, 3, 3, 5, 5, 5;
  const auto ranking = dp_scores(x, std::vector<int>{1, 1, 0, 0});
  CHECK(ranking.order == std::vector<Eigen::Index>{0, 1, 2});
}

TEST_CASE("printed formula variant is selectable")
{
  FeatureMatrix x(5, 1);
  x << 1, 3, 0, 0, 0;
  const std::vector<int> labels{1, 1, 0, 0, 0};
  const auto printed = dp_scores(x, labels, DpFormula::printed);
  CHECK(std::isfinite(printed.scores(0)));
  CHECK(parse_dp_formula("printed") == DpFormula::printed);
  CHECK_THROWS_AS(parse_dp_formula("t"), ParseError);
}

TEST_CASE("a class with one sample is a statistics error naming it")
{
  FeatureMatrix x(3, 2);
  x.setRandom();
  try {
    dp_scores(x, std::vector<int>{1, 0, 0});
    FAIL("expected StatisticsError");
  } catch (const StatisticsError & error) {
    CHECK(std::string(error.what()).find("positive") != std::string::npos);
  }
}

TEST_CASE("perfect accuracy at five features stops immediately")
{
  DpRanking ranking;
  ranking.order = {4, 2, 0, 1, 3, 5, 6, 7};
  std::vector<std::size_t> seen;
  const auto result = incremental_select(ranking, [&](std::span<const Eigen::Index> subset) {
    seen.push_back(subset.size());
    return 100.0;
  });
  CHECK(result.chosen_size == 5);
  CHECK(result.selected_indices == std::vector<Eigen::Index>{4, 2, 0, 1, 3});
  CHECK(seen == std::vector<std::size_t>{5});
}

TEST_CASE("ties in the curve resolve to the smallest size")
{
  DpRanking ranking;
  ranking.order.resize(20);
  std::iota(ranking.order.begin(), ranking.order.end(), 0);
  const auto result = incremental_select(
    ranking, [](std::span<const Eigen::Index> s) { return s.size() < 9 ? 60.0 + s.size() : 68.0; },
    SearchOptions{5, 15});
  CHECK(result.chosen_size == 8);
  CHECK(result.curve.size() == 11);
  CHECK(result.curve.front().first == 5);
  CHECK(result.curve.back().first == 15);
}

TEST_CASE("too few features or an oversized cap is a selection error")
{
  DpRanking ranking;
  ranking.order = {0, 1, 2};
  auto eval = [](std::span<const Eigen::Index>) { return 50.0; };
  CHECK_THROWS_AS(incremental_select(ranking, eval), SelectionError);
  ranking.order = {0, 1, 2, 3, 4, 5};
  CHECK_THROWS_AS(incremental_select(ranking, eval, SearchOptions{5, 10}), SelectionError);
}

TEST_CASE("plateau search on data with two informative features")
{
  Rng rng(12);
  const Eigen::Index n = 80;
  FeatureMatrix x(n, 30);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = i % 2;
    labels[static_cast<std::size_t>(i)] = y;
    for (Eigen::Index j = 0; j < 30; ++j) {
      x(i, j) = normal(rng);
    }
    x(i, 0) += y ? 2.0 : -2.0;
    x(i, 1) += y ? 1.5 : -1.5;
  }
  const auto ranking = dp_scores(x, labels);
  CHECK(ranking.order[0] == 0);
  CHECK(ranking.order[1] == 1);

  InnerCvEvaluator evaluator(x, labels, SvmParams{}, 3);
  const auto result = incremental_select(ranking, evaluator, SearchOptions{5, 30});
  // Exhaustive prefix evaluation with a fresh evaluator must agree with the
  // incremental one, and the chosen size is the first maximum.
  double best = -1.0;
  std::size_t best_size = 0;
  for (const auto & [size, accuracy] : result.curve) {
    const std::span<const Eigen::Index> prefix(ranking.order.data(), size);
    InnerCvEvaluator single(x, labels, SvmParams{}, 3);
    CHECK(single.evaluate(prefix) == doctest::Approx(accuracy).epsilon(1e-9));
    if (accuracy > best) {
      best = accuracy;
      best_size = size;
    }
  }
  CHECK(result.chosen_size == best_size);
  CHECK(best > 85.0);
}

TEST_CASE("inner evaluator is deterministic for a seed")
{
  Rng rng(5);
  FeatureMatrix x(40, 10);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  std::vector<int> labels(40);
  for (std::size_t i = 0; i < 40; ++i) labels[i] = static_cast<int>(i % 2);
  const std::vector<Eigen::Index> subset{3, 1, 4, 0, 2};
  InnerCvEvaluator a(x, labels, SvmParams{}, 99);
  InnerCvEvaluator b(x, labels, SvmParams{}, 99);
  CHECK(a.evaluate(subset) == b.evaluate(subset));
  SvmParams rbf;
  rbf.kernel.type = KernelType::rbf;
  InnerCvEvaluator c(x, labels, rbf, 99);
  const double acc = c.evaluate(subset);
  CHECK(acc >= 0.0);
  CHECK(acc <= 100.0);
}

TEST_CASE("stratified halves split every class evenly and deterministically")
{
  std::vector<int> strata;
  for (int i = 0; i < 21; ++i) strata.push_back(i < 11 ? 0 : 1);
  const auto [a, b] = stratified_halves(strata, 4);
  CHECK(a.size() + b.size() == 21);
  auto count = [&](const std::vector<Eigen::Index> & half, int cls) {
    return std::count_if(half.begin(), half.end(), [&](Eigen::Index i) { return strata[i] == cls; });
  };
  CHECK(std::abs(count(a, 0) - count(b, 0)) <= 1);
  CHECK(std::abs(count(a, 1) - count(b, 1)) == 0);
  CHECK(std::abs(static_cast<long>(a.size()) - static_cast<long>(b.size())) <= 1);
  const auto again = stratified_halves(strata, 4);
  CHECK(again.first == a);
  CHECK(stratified_halves(strata, 5).first != a);
}

TEST_CASE("selection report is valid JSON with the curve")
{
  FeatureMatrix x(6, 6);
  x.setZero();
  x.col(0) << 1, 2, 3, 10, 11, 12;
  const auto ranking = dp_scores(x, std::vector<int>{0, 0, 0, 1, 1, 1});
  const auto result = incremental_select(ranking, [](std::span<const Eigen::Index>) { return 90.0; });
  const auto json = nlohmann::json::parse(selection_report(ranking, result));
  CHECK(json.at("chosen_size") == 5);
  CHECK(json.at("accuracy_curve").size() == 2);
}
