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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails or exceeds its time budget.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "../oracles.hpp"
#include "../test_util.hpp"
#include "texdesc/cli.hpp"
#include "texdesc/eval.hpp"
#include "texdesc/hox.hpp"
#include "texdesc/pbdct.hpp"
#include "texdesc/synth.hpp"

using namespace texdesc;

namespace
{

struct Verdict
{
  bool pass = false;
  std::string detail;
};

double mean_accuracy(const EvaluationReport & report, DensitySelector density, Stage stage)
{
  const auto * cell = report.find(density, stage);
  if (cell == nullptr || cell->status != CellStatus::ok || !cell->accuracy.mean) {
    return -1.0;
  }
  return *cell->accuracy.mean;
}

std::string fmt(const char * format, double a, double b = 0.0, double c = 0.0)
{
  char buffer[256];
  std::snprintf(buffer, sizeof(buffer), format, a, b, c);
  return buffer;
}

Verdict descriptor_length()
{
  Rng rng(101);
  for (int trial = 0; trial < 3; ++trial) {
    const ImageD patch = test::random_image(rng, 128, 128);
    if (extract_hog(patch).values.size() != 7200 || extract_hot(patch, 1.0 + trial).values.size() != 7200) {
      return {false, "default layout is not 7200 long"};
    }
  }
  const ImageD patch = test::random_image(rng, 128, 128);
  for (int c : {4, 8, 16}) {
    for (int l : {1, 2, 3}) {
      const HistogramConfig cfg{c, l, 8, 1e-5};
      const Eigen::Index expected = static_cast<Eigen::Index>(l) * l * (c - l + 1) * (c - l + 1) * 8;
      if (extract_hog(patch, cfg).values.size() != expected || extract_hot(patch, 2.0, cfg).values.size() != expected) {
        return {false, "c=" + std::to_string(c) + " l=" + std::to_string(l) + " breaks the length formula"};
      }
    }
  }
  return {true, "7200 by default, 9/9 layouts follow l^2(c-l+1)^2 B"};
}

Verdict dct_oracle()
{
  Rng rng(202);
  double worst_direct = 0.0;
  double worst_inverse = 0.0;
  double worst_energy = 0.0;
  for (Eigen::Index n : {8, 16}) {
    for (int trial = 0; trial < 50; ++trial) {
      const ImageD image = test::random_image(rng, n, n);
      const ImageD coeffs = dct2(image);
      worst_direct = std::max(worst_direct, (coeffs - oracle::dct_direct(image)).cwiseAbs().maxCoeff());
      worst_inverse = std::max(worst_inverse, (idct2(coeffs) - image).cwiseAbs().maxCoeff());
      worst_energy =
        std::max(worst_energy, std::abs(coeffs.squaredNorm() - image.squaredNorm()) / image.squaredNorm());
    }
  }
  const bool ok = worst_direct < 1e-9 && worst_inverse < 1e-9 && worst_energy < 1e-9;
  return {ok, fmt("max |direct| %.2e, max |inverse| %.2e, max energy rel %.2e", worst_direct, worst_inverse,
                  worst_energy)};
}

Verdict gabor_oracle()
{
  Rng rng(303);
  int mismatches = 0;
  for (double sigma : {1.0, 3.0, 5.0}) {
    for (int trial = 0; trial < 20; ++trial) {
      const ImageD image = test::random_image(rng, 32, 32);
      const auto field = gabor_response(image, sigma);
      const auto reference = oracle::gabor_brute_force(image, sigma);
      mismatches += (field.magnitude.array() != reference.magnitude.array()).count();
      mismatches += (field.orientation.array() != reference.orientation.array()).count();
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatching values over 60 patches"};
}

Verdict dp_oracle()
{
  Rng rng(404);
  int mismatched = 0;
  for (int trial = 0; trial < 100; ++trial) {
    FeatureMatrix x(50, 20);
    std::vector<int> labels(50);
    for (Eigen::Index i = 0; i < 50; ++i) {
      labels[static_cast<std::size_t>(i)] = uniform01(rng) < 0.5 ? 1 : 0;
    }
    labels[0] = labels[1] = 1;
    labels[2] = labels[3] = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x.data()[i] = normal(rng) + 0.3 * labels[static_cast<std::size_t>(i / 20)] * static_cast<double>(i % 3);
    }
    const auto ranking = dp_scores(x, labels);
    mismatched += ranking.order != oracle::descending_order(oracle::welch_abs_t(x, labels));
  }
  return {mismatched == 0, std::to_string(mismatched) + "/100 orderings differ"};
}

Verdict auc_oracle()
{
  Rng rng(505);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10 + uniform_index(rng, 41);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = normal(rng);
      labels[i] = i % 2 == 0 ? 1 : 0;
    }
    shuffle(labels, rng);
    worst = std::max(worst, std::abs(*auc(scores, labels) - oracle::mann_whitney_auc(scores, labels)));
  }
  std::vector<double> ranked(20);
  std::vector<int> split(20);
  for (std::size_t i = 0; i < 20; ++i) {
    ranked[i] = static_cast<double>(i);
    split[i] = i >= 10 ? 1 : 0;
  }
  std::vector<int> reversed(20);
  for (std::size_t i = 0; i < 20; ++i) reversed[i] = 1 - split[i];
  const double perfect = *auc(ranked, split);
  const double inverted = *auc(ranked, reversed);
  const bool ok = worst < 1e-9 && perfect == 100.0 && inverted == 0.0;
  return {ok, fmt("max deviation %.2e, perfect %.17g, reversed %.17g", worst, perfect, inverted)};
}

ProtocolConfig protocol_for(DescriptorTag tag)
{
  ProtocolConfig protocol;
  protocol.training.descriptor.tag = tag;
  protocol.training.descriptor.sigma = 1.0;
  protocol.training.descriptor.keep_fraction = 0.5;
  return protocol;
}

const std::vector<DensitySelector> kAllOnly{DensitySelector::all};

Verdict texture_gate()
{
  const Dataset ds = synth::texture_suite(200, 6, 0.05);
  const double hot =
    mean_accuracy(cross_validate(ds, kAllOnly, protocol_for(DescriptorTag::HOT)), DensitySelector::all,
                  Stage::normal_abnormal);
  const double pbdct =
    mean_accuracy(cross_validate(ds, kAllOnly, protocol_for(DescriptorTag::PBDCT)), DensitySelector::all,
                  Stage::normal_abnormal);
  return {hot >= 95.0 && pbdct >= 90.0, fmt("HOT %.2f%% (>= 95), PB-DCT %.2f%% (>= 90)", hot, pbdct)};
}

Verdict shape_gate()
{
  const Dataset ds = synth::shape_suite(150, 7, 0.05);
  const double acc = mean_accuracy(cross_validate(ds, kAllOnly, protocol_for(DescriptorTag::PBDCT)),
                                   DensitySelector::all, Stage::benign_malignant);
  return {acc >= 90.0, fmt("PB-DCT stage 2 %.2f%% (>= 90)", acc)};
}

Verdict leakage_sentinel()
{
  const Dataset ds = synth::noise_label_suite(200, 8, 0.05);
  const auto report = cross_validate(ds, kAllOnly, protocol_for(DescriptorTag::HOT));
  const double stage1 = mean_accuracy(report, DensitySelector::all, Stage::normal_abnormal);
  const double stage2 = mean_accuracy(report, DensitySelector::all, Stage::benign_malignant);
  auto inside = [](double a) { return a >= 43.0 && a <= 57.0; };
  return {inside(stage1) && inside(stage2), fmt("stage 1 %.2f%%, stage 2 %.2f%% (band 43..57)", stage1, stage2)};
}

int run_cli(const std::vector<std::string> & args)
{
  std::vector<const char *> argv{"texdesc"};
  for (const auto & a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Verdict determinism()
{
  test::TempDir dir("acceptance_det");
  const auto manifest = write_dataset(synth::texture_suite(30, 11), dir / "data");
  for (const char * run : {"a", "b"}) {
    const int code = run_cli({"evaluate", "--descriptor", "hot", "--sigma", "1", "--manifest", manifest.string(),
                              "--report", (dir / run).string()});
    if (code != 0) {
      return {false, "evaluate exited with " + std::to_string(code)};
    }
  }
  std::size_t files = 0;
  for (const auto & entry : std::filesystem::directory_iterator(dir / "a")) {
    ++files;
    if (test::slurp(entry.path()) != test::slurp(dir / "b" / entry.path().filename().string())) {
      return {false, entry.path().filename().string() + " differs between runs"};
    }
  }

  const Dataset ds = load_manifest(manifest);
  TrainingConfig training = protocol_for(DescriptorTag::HOT).training;
  const auto bundle = train_pipeline(ds, DensitySelector::all, training, 3);
  save_bundle(bundle, dir / "bundle.txpb");
  const auto loaded = load_bundle(dir / "bundle.txpb");
  for (const auto & record : ds.records) {
    const auto a = classify(bundle, record.patch);
    const auto b = classify(loaded, record.patch);
    const bool same = a.label == b.label && std::memcmp(&a.stage1_score, &b.stage1_score, sizeof(double)) == 0 &&
                      a.stage2_score.has_value() == b.stage2_score.has_value() &&
                      (!a.stage2_score || std::memcmp(&*a.stage2_score, &*b.stage2_score, sizeof(double)) == 0);
    if (!same) {
      return {false, "classification of " + record.id + " changed after reload"};
    }
  }
  return {true, std::to_string(files) + " report files identical, " + std::to_string(ds.size()) +
                  " classifications bit-identical after reload"};
}

Verdict protocol_structure()
{
  const Dataset ds = synth::texture_suite(24, 12);
  const std::vector<DensitySelector> cells{DensitySelector::d, DensitySelector::e, DensitySelector::f,
                                           DensitySelector::g, DensitySelector::all};
  const auto report = cross_validate(ds, cells, protocol_for(DescriptorTag::HOG));
  const auto json = nlohmann::json::parse(report_text(report));
  std::size_t ok = 0;
  std::size_t absent = 0;
  std::set<std::string> names;
  for (const auto & cell : json.at("cells")) {
    names.insert(cell.at("density").get<std::string>() + "/" + cell.at("stage").get<std::string>());
    const auto status = cell.at("status").get<std::string>();
    if (status == "ok") {
      const auto & repeats = cell.at("repeats");
      if (repeats.size() != 10) return {false, "a cell has " + std::to_string(repeats.size()) + " repeats"};
      for (const auto & repeat : repeats) {
        if (repeat.at("folds").size() != 2) return {false, "a repeat does not have 2 folds"};
      }
      ++ok;
    } else if (status == "absent") {
      if (!cell.at("summary").is_null() || !cell.at("repeats").is_null()) {
        return {false, "absent cell carries values"};
      }
      ++absent;
    } else {
      return {false, "cell errored: " + cell.at("note").dump()};
    }
  }
  const bool ok_cells = names.size() == 10 && ok + absent == 10 && absent > 0;
  return {ok_cells, std::to_string(ok) + " cells with 10x2 folds, " + std::to_string(absent) +
                      " explicit absences, " + std::to_string(names.size()) + " distinct cells"};
}

}  // namespace

int main()
{
  struct Criterion
  {
    int id;
    const char * name;
    double budget_s;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
    {1, "descriptor length", 5, descriptor_length},
    {2, "DCT oracle equivalence", 10, dct_oracle},
    {3, "Gabor oracle equivalence", 30, gabor_oracle},
    {4, "DP ordering oracle", 5, dp_oracle},
    {5, "AUC oracle", 5, auc_oracle},
    {6, "synthetic normal-abnormal gate", 120, texture_gate},
    {7, "synthetic benign-malignant gate", 120, shape_gate},
    {8, "leakage sentinel", 120, leakage_sentinel},
    {9, "determinism", 60, determinism},
    {10, "protocol structure", 60, protocol_structure},
  };

  int failures = 0;
  for (const auto & c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict verdict;
    try {
      verdict = c.check();
    } catch (const std::exception & error) {
      verdict = {false, std::string("exception: ") + error.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_s;
    const bool pass = verdict.pass && in_time;
    failures += !pass;
    std::printf("%s %2d %s: %s; %.2f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                verdict.detail.c_str(), seconds, c.budget_s, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
