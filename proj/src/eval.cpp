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

#include "texdesc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "texdesc/parallel.hpp"
#include "texdesc/random.hpp"

namespace texdesc
{

using nlohmann::ordered_json;

Metrics metrics(const ConfusionCounts & c)
{
  Metrics m;
  if (c.tp + c.fn > 0) {
    m.sensitivity = 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  if (c.fp + c.tn > 0) {
    m.specificity = 100.0 * static_cast<double>(c.tn) / static_cast<double>(c.fp + c.tn);
  }
  if (c.total() > 0) {
    m.accuracy = 100.0 * static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  }
  return m;
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels)
{
  if (scores.size() != labels.size()) {
    throw ConfigError("score and label counts differ");
  }
  const auto positives = static_cast<double>(std::count_if(labels.begin(), labels.end(), [](int v) { return v != 0; }));
  const auto negatives = static_cast<double>(labels.size()) - positives;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const auto pct = [](double part, double whole) { return whole > 0.0 ? 100.0 * part / whole : 0.0; };
  std::vector<RocPoint> roc;
  roc.push_back({std::numeric_limits<double>::infinity(), 100.0, 0.0});
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    while (k < order.size() && scores[order[k]] == threshold) {
      (labels[order[k]] != 0 ? tp : fp) += 1.0;
      ++k;
    }
    roc.push_back({threshold, pct(negatives - fp, negatives), pct(tp, positives)});
  }
  roc.push_back({-std::numeric_limits<double>::infinity(), pct(negatives - fp, negatives), pct(tp, positives)});
  return roc;
}

double auc_from_roc(std::span<const RocPoint> roc)
{
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < roc.size(); ++k) {
    area += 0.5 * (roc[k].specificity - roc[k + 1].specificity) * (roc[k].sensitivity + roc[k + 1].sensitivity);
  }
  return area / 100.0;
}

std::optional<double> auc(std::span<const double> scores, std::span<const int> labels)
{
  const auto positives = std::count_if(labels.begin(), labels.end(), [](int v) { return v != 0; });
  if (positives == 0 || positives == static_cast<long>(labels.size())) {
    return std::nullopt;
  }
  const auto roc = roc_curve(scores, labels);
  return auc_from_roc(roc);
}

const CellResult * EvaluationReport::find(DensitySelector density, Stage stage) const
{
  for (const auto & cell : cells) {
    if (cell.density == density && cell.stage == stage) {
      return &cell;
    }
  }
  return nullptr;
}

bool EvaluationReport::any_error() const
{
  return std::any_of(cells.begin(), cells.end(), [](const CellResult & c) { return c.status == CellStatus::error; });
}

namespace
{

struct CellInput
{
  std::vector<std::size_t> rows;  // into the extracted matrix
  std::vector<int> labels;
};

std::optional<double> mean_of_defined(std::optional<double> a, std::optional<double> b)
{
  if (a && b) {
    return 0.5 * (*a + *b);
  }
  return a ? a : b;
}

Aggregate aggregate(const std::vector<std::optional<double>> & values)
{
  Aggregate agg;
  std::vector<double> defined;
  for (const auto & v : values) {
    if (v) {
      defined.push_back(*v);
    } else {
      ++agg.undefined;
    }
  }
  agg.count = defined.size();
  if (defined.empty()) {
    return agg;
  }
  double sum = 0.0;
  for (double v : defined) {
    sum += v;
  }
  const double mean = sum / static_cast<double>(defined.size());
  double ss = 0.0;
  for (double v : defined) {
    ss += (v - mean) * (v - mean);
  }
  agg.mean = mean;
  agg.std = defined.size() > 1 ? std::sqrt(ss / static_cast<double>(defined.size() - 1)) : 0.0;
  return agg;
}

FoldResult run_fold(const FeatureMatrix & features, const std::vector<std::string> & ids, const CellInput & cell,
                    const std::vector<Eigen::Index> & train, const std::vector<Eigen::Index> & test, Stage stage,
                    const TrainingConfig & config, std::uint64_t seed)
{
  FeatureMatrix train_x(static_cast<Eigen::Index>(train.size()), features.cols());
  std::vector<int> train_y;
  FoldResult fold;
  for (std::size_t k = 0; k < train.size(); ++k) {
    const std::size_t row = cell.rows[static_cast<std::size_t>(train[k])];
    train_x.row(static_cast<Eigen::Index>(k)) = features.row(static_cast<Eigen::Index>(row));
    train_y.push_back(cell.labels[static_cast<std::size_t>(train[k])]);
    fold.train_ids.push_back(ids[row]);
  }
  const StageModel model = train_stage(train_x, train_y, stage, config, seed);
  fold.selected_size = model.selected_indices.size();

  Eigen::VectorXd picked(static_cast<Eigen::Index>(model.selected_indices.size()));
  for (auto t : test) {
    const std::size_t row = cell.rows[static_cast<std::size_t>(t)];
    for (std::size_t k = 0; k < model.selected_indices.size(); ++k) {
      picked(static_cast<Eigen::Index>(k)) = features(static_cast<Eigen::Index>(row), model.selected_indices[k]);
    }
    const DecisionScore score = decision(model.svm, picked);
    const int truth = cell.labels[static_cast<std::size_t>(t)];
    fold.test_ids.push_back(ids[row]);
    fold.test_scores.push_back(score.raw);
    fold.test_labels.push_back(truth);
    if (score.positive) {
      (truth ? fold.counts.tp : fold.counts.fp) += 1;
    } else {
      (truth ? fold.counts.fn : fold.counts.tn) += 1;
    }
  }
  fold.metrics = metrics(fold.counts);
  fold.auc = auc(fold.test_scores, fold.test_labels);
  return fold;
}

}  // namespace

EvaluationReport cross_validate(const Dataset & dataset, std::span<const DensitySelector> densities,
                                const ProtocolConfig & protocol)
{
  EvaluationReport report;
  report.config = protocol.training;
  report.seeds = protocol.seeds;
  if (protocol.seeds.empty()) {
    throw ConfigError("cross-validation needs at least one seed");
  }

  // Extract only records some requested slice needs.
  std::vector<std::size_t> used;
  std::vector<long> matrix_row(dataset.size(), -1);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const bool wanted = std::any_of(densities.begin(), densities.end(), [&](DensitySelector sel) {
      return matches(sel, dataset.records[i].density);
    });
    if (wanted) {
      matrix_row[i] = static_cast<long>(used.size());
      used.push_back(i);
    }
  }
  Dataset subset;
  std::vector<std::string> ids;
  for (auto i : used) {
    subset.records.push_back(dataset.records[i]);
    ids.push_back(dataset.records[i].id);
  }
  const FeatureMatrix features = extract_matrix(subset, protocol.training.descriptor);

  const Stage stages[] = {Stage::normal_abnormal, Stage::benign_malignant};
  std::vector<CellInput> inputs;
  for (auto density : densities) {
    for (auto stage : stages) {
      CellResult cell;
      cell.density = density;
      cell.stage = stage;
      CellInput input;
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (!matches(density, dataset.records[i].density)) {
          continue;
        }
        if (auto label = stage_label(stage, dataset.records[i].label)) {
          input.rows.push_back(static_cast<std::size_t>(matrix_row[i]));
          input.labels.push_back(*label);
        }
      }
      const long pos = std::count(input.labels.begin(), input.labels.end(), 1);
      const long neg = static_cast<long>(input.labels.size()) - pos;
      if (pos < 4 || neg < 4) {
        cell.status = CellStatus::absent;
        cell.note = "untrainable: " + std::to_string(neg) + " negative and " + std::to_string(pos) +
                    " positive records (need at least 4 each)";
      }
      report.cells.push_back(std::move(cell));
      inputs.push_back(std::move(input));
    }
  }

  struct Task
  {
    std::size_t cell;
    std::size_t repeat;
    int fold;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    if (report.cells[c].status != CellStatus::ok) {
      continue;
    }
    report.cells[c].repeats.resize(protocol.seeds.size());
    for (std::size_t r = 0; r < protocol.seeds.size(); ++r) {
      report.cells[c].repeats[r].seed = protocol.seeds[r];
      report.cells[c].repeats[r].folds.resize(2);
      tasks.push_back({c, r, 0});
      tasks.push_back({c, r, 1});
    }
  }

  std::vector<std::optional<std::string>> task_errors(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) {
    const Task & task = tasks[t];
    CellResult & cell = report.cells[task.cell];
    const CellInput & input = inputs[task.cell];
    const std::uint64_t seed = protocol.seeds[task.repeat];
    const std::uint64_t stream = 16 * static_cast<std::uint64_t>(cell.density) + static_cast<std::uint64_t>(cell.stage);
    auto [half_a, half_b] = stratified_halves(input.labels, mix_seed(seed, stream));
    const auto & train = task.fold == 0 ? half_a : half_b;
    const auto & test = task.fold == 0 ? half_b : half_a;
    try {
      cell.repeats[task.repeat].folds[static_cast<std::size_t>(task.fold)] =
        run_fold(features, ids, input, train, test, cell.stage, protocol.training,
                 mix_seed(seed, 1000 + 2 * stream + static_cast<std::uint64_t>(task.fold)));
    } catch (const std::exception & error) {
      task_errors[t] = error.what();
    }
  });

  std::vector<std::string> failures(report.cells.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (task_errors[t] && report.cells[tasks[t].cell].status != CellStatus::error) {
      report.cells[tasks[t].cell].status = CellStatus::error;
      failures[tasks[t].cell] = *task_errors[t];
    }
  }

  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    CellResult & cell = report.cells[c];
    if (cell.status == CellStatus::error) {
      cell.note = failures[c];
      cell.repeats.clear();
      continue;
    }
    if (cell.status != CellStatus::ok) {
      continue;
    }
    std::vector<std::optional<double>> sens, spec, acc, area;
    std::vector<double> pooled_scores;
    std::vector<int> pooled_labels;
    for (auto & repeat : cell.repeats) {
      const auto & f0 = repeat.folds[0];
      const auto & f1 = repeat.folds[1];
      repeat.metrics.sensitivity = mean_of_defined(f0.metrics.sensitivity, f1.metrics.sensitivity);
      repeat.metrics.specificity = mean_of_defined(f0.metrics.specificity, f1.metrics.specificity);
      repeat.metrics.accuracy = mean_of_defined(f0.metrics.accuracy, f1.metrics.accuracy);
      repeat.auc = mean_of_defined(f0.auc, f1.auc);
      sens.push_back(repeat.metrics.sensitivity);
      spec.push_back(repeat.metrics.specificity);
      acc.push_back(repeat.metrics.accuracy);
      area.push_back(repeat.auc);
      for (const auto & fold : repeat.folds) {
        pooled_scores.insert(pooled_scores.end(), fold.test_scores.begin(), fold.test_scores.end());
        pooled_labels.insert(pooled_labels.end(), fold.test_labels.begin(), fold.test_labels.end());
      }
    }
    cell.sensitivity = aggregate(sens);
    cell.specificity = aggregate(spec);
    cell.accuracy = aggregate(acc);
    cell.auc = aggregate(area);
    cell.roc = roc_curve(pooled_scores, pooled_labels);
  }
  return report;
}

namespace
{

ordered_json opt(const std::optional<double> & v)
{
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json metrics_json(const Metrics & m, const std::optional<double> & area)
{
  return ordered_json{
    {"sensitivity", opt(m.sensitivity)},
    {"specificity", opt(m.specificity)},
    {"accuracy", opt(m.accuracy)},
    {"auc", opt(area)},
  };
}

ordered_json aggregate_json(const Aggregate & a)
{
  return ordered_json{{"mean", opt(a.mean)}, {"std", opt(a.std)}, {"count", a.count}, {"undefined", a.undefined}};
}

std::string_view status_name(CellStatus status)
{
  switch (status) {
    case CellStatus::ok: return "ok";
    case CellStatus::absent: return "absent";
    case CellStatus::error: return "error";
  }
  return "?";
}

std::string roc_file_name(const CellResult & cell)
{
  return "roc_" + std::string(to_string(cell.density)) + "_" + std::string(to_string(cell.stage)) + ".csv";
}

std::string format_double(double v)
{
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

std::string report_text(const EvaluationReport & report)
{
  ordered_json root;
  root["format"] = "texdesc-report";
  root["version"] = 1;
  root["config_digest"] = report.config.descriptor.digest();
  root["descriptor"] = to_string(report.config.descriptor.tag);
  root["descriptor_canonical"] = report.config.descriptor.canonical();
  root["svm"] = {{"kernel", to_string(report.config.svm.kernel.type)},
                 {"gamma", report.config.svm.kernel.gamma},
                 {"C", report.config.svm.C},
                 {"tol", report.config.svm.tol}};
  root["selection"] = {{"min_size", report.config.selection.search.min_size},
                       {"cap", report.config.selection.search.cap},
                       {"inner_repeats", report.config.selection.inner_repeats},
                       {"formula", to_string(report.config.selection.formula)}};
  root["seeds"] = report.seeds;
  ordered_json cells = ordered_json::array();
  for (const auto & cell : report.cells) {
    ordered_json j;
    j["density"] = to_string(cell.density);
    j["stage"] = to_string(cell.stage);
    j["status"] = status_name(cell.status);
    j["note"] = cell.note.empty() ? ordered_json(nullptr) : ordered_json(cell.note);
    if (cell.status != CellStatus::ok) {
      j["summary"] = nullptr;
      j["repeats"] = nullptr;
      j["roc_file"] = nullptr;
      cells.push_back(j);
      continue;
    }
    j["summary"] = {{"sensitivity", aggregate_json(cell.sensitivity)},
                    {"specificity", aggregate_json(cell.specificity)},
                    {"accuracy", aggregate_json(cell.accuracy)},
                    {"auc", aggregate_json(cell.auc)}};
    ordered_json repeats = ordered_json::array();
    for (const auto & repeat : cell.repeats) {
      ordered_json r;
      r["seed"] = repeat.seed;
      r["metrics"] = metrics_json(repeat.metrics, repeat.auc);
      ordered_json folds = ordered_json::array();
      for (std::size_t f = 0; f < repeat.folds.size(); ++f) {
        const auto & fold = repeat.folds[f];
        ordered_json fj;
        fj["fold"] = f;
        fj["train_size"] = fold.train_ids.size();
        fj["test_size"] = fold.test_ids.size();
        fj["selected_size"] = fold.selected_size;
        fj["counts"] = {{"tp", fold.counts.tp}, {"fp", fold.counts.fp}, {"tn", fold.counts.tn}, {"fn", fold.counts.fn}};
        fj["metrics"] = metrics_json(fold.metrics, fold.auc);
        folds.push_back(fj);
      }
      r["folds"] = folds;
      repeats.push_back(r);
    }
    j["repeats"] = repeats;
    j["roc_file"] = roc_file_name(cell);
    cells.push_back(j);
  }
  root["cells"] = cells;
  return root.dump(2) + "\n";
}

void emit_report(const EvaluationReport & report, const std::filesystem::path & dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto write = [](const std::filesystem::path & path, const std::string & text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
      throw IoError("failed writing " + path.string());
    }
  };
  write(dir / "report.json", report_text(report));
  for (const auto & cell : report.cells) {
    if (cell.status != CellStatus::ok) {
      continue;
    }
    std::string csv = "threshold,spec,sens\n";
    for (const auto & point : cell.roc) {
      csv += format_double(point.threshold) + "," + format_double(point.specificity) + "," +
             format_double(point.sensitivity) + "\n";
    }
    write(dir / roc_file_name(cell), csv);
  }
}

}  // namespace texdesc
