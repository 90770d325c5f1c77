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

#include "texdesc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "texdesc/descriptor.hpp"
#include "texdesc/dpselect.hpp"
#include "texdesc/eval.hpp"
#include "texdesc/features_io.hpp"
#include "texdesc/pipeline.hpp"

namespace texdesc::cli
{

namespace
{

/// Signals a usage problem found after CLI11 parsing succeeded.
struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct RunConfig
{
  std::string manifest;
  std::string descriptor;
  std::string sigma;
  double keep_fraction = 0.5;
  bool keep_fraction_set = false;
  bool no_enhance = false;
  std::string response_rule = "min_real";
  int cells = 16;
  int block = 2;
  int bins = 8;
  std::string density;
  std::uint64_t seed = 0;
  std::string seeds = "0..9";
  std::string stage = "normal_abnormal";
  std::string kernel = "linear";
  double C = 1.0;
  double gamma = 0.0;
  double tol = 1e-3;
  std::size_t cap = 0;
  std::size_t min_size = 5;
  int inner_repeats = 3;
  std::string dp_formula = "welch";
  std::string out;
  std::string format;
  std::string report;
  std::string bundle;
  std::vector<std::string> images;
};

struct Parser
{
  RunConfig cfg;
  std::unique_ptr<CLI::App> app;
  CLI::App * extract = nullptr;
  CLI::App * select = nullptr;
  CLI::App * train = nullptr;
  CLI::App * evaluate = nullptr;
  CLI::App * classify = nullptr;
};

void add_descriptor_flags(CLI::App * sub, RunConfig & cfg, bool sweep)
{
  sub->add_option("--descriptor", cfg.descriptor, "Descriptor: hog, hot or pbdct")
    ->required()
    ->check(CLI::IsMember({"hog", "hot", "pbdct"}));
  sub->add_option("--sigma", cfg.sigma,
                  sweep ? "Gabor sigma for hot; a..b sweeps integers inclusive" : "Gabor sigma for hot (required)");
  sub->add_option_function<double>(
    "--keep-fraction",
    [&cfg](const double & value) {
      cfg.keep_fraction = value;
      cfg.keep_fraction_set = true;
    },
    "Fraction of zigzag-ordered DCT coefficients kept by pbdct (default 0.5)");
  sub->add_flag("--no-enhance", cfg.no_enhance, "Skip two-stage CLAHE (min-max normalization still applies)");
  sub->add_option("--response-rule", cfg.response_rule, "Gabor response collapse: min_real or max_abs")
    ->check(CLI::IsMember({"min_real", "max_abs"}));
  sub->add_option("--cells", cfg.cells, "Cells per patch side for hog/hot (default 16)");
  sub->add_option("--block", cfg.block, "Block side in cells for hog/hot (default 2)");
  sub->add_option("--bins", cfg.bins, "Orientation bins for hog/hot (default 8)");
}

void add_training_flags(CLI::App * sub, RunConfig & cfg)
{
  sub->add_option("--kernel", cfg.kernel, "SVM kernel: linear or rbf")->check(CLI::IsMember({"linear", "rbf"}));
  sub->add_option("--C", cfg.C, "SVM box constraint (default 1)");
  sub->add_option("--gamma", cfg.gamma, "RBF gamma; 0 means 1/feature_count");
  sub->add_option("--tol", cfg.tol, "SMO stopping tolerance (default 1e-3)");
  sub->add_option("--cap", cfg.cap, "Largest feature subset tried; 0 means min(features, 5200)");
  sub->add_option("--min-size", cfg.min_size, "Smallest feature subset tried (default 5)");
  sub->add_option("--inner-repeats", cfg.inner_repeats, "Repeats of the inner 2-fold selection CV (default 3)");
  sub->add_option("--dp-formula", cfg.dp_formula, "DP statistic: welch or printed")
    ->check(CLI::IsMember({"welch", "printed"}));
}

std::unique_ptr<Parser> make_parser()
{
  auto p = std::make_unique<Parser>();
  RunConfig & cfg = p->cfg;
  p->app = std::make_unique<CLI::App>("Texture descriptors and two-stage patch classification", "texdesc");
  p->app->require_subcommand(1);

  p->extract = p->app->add_subcommand("extract", "Write a feature matrix for every patch in a manifest");
  p->extract->add_option("--manifest", cfg.manifest, "CSV manifest with path,density,label")->required();
  add_descriptor_flags(p->extract, cfg, false);
  p->extract->add_option("--density", cfg.density, "Density slice: d, e, f, g or all (default all)");
  p->extract->add_option("--out", cfg.out, "Output feature matrix path")->required();
  p->extract->add_option("--format", cfg.format, "csv or bin (default: bin for .bin paths, else csv)")
    ->check(CLI::IsMember({"csv", "bin"}));

  p->select = p->app->add_subcommand("select", "Rank features by DP and run the incremental subset search");
  p->select->add_option("--manifest", cfg.manifest, "CSV manifest with path,density,label")->required();
  add_descriptor_flags(p->select, cfg, false);
  add_training_flags(p->select, cfg);
  p->select->add_option("--stage", cfg.stage, "normal_abnormal (1) or benign_malignant (2)");
  p->select->add_option("--density", cfg.density, "Density slice: d, e, f, g or all (default all)");
  p->select->add_option("--seed", cfg.seed, "Seed for the inner cross-validation splits");
  p->select->add_option("--out", cfg.out, "Selection report path (default stdout)");

  p->train = p->app->add_subcommand("train", "Train a two-stage bundle on one density slice");
  p->train->add_option("--manifest", cfg.manifest, "CSV manifest with path,density,label")->required();
  add_descriptor_flags(p->train, cfg, false);
  add_training_flags(p->train, cfg);
  p->train->add_option("--density", cfg.density, "Density slice: d, e, f, g or all (default all)");
  p->train->add_option("--seed", cfg.seed, "Seed for every random decision");
  p->train->add_option("--bundle", cfg.bundle, "Output bundle path")->required();

  p->evaluate = p->app->add_subcommand("evaluate", "Repeated two-fold cross-validation report");
  p->evaluate->add_option("--manifest", cfg.manifest, "CSV manifest with path,density,label")->required();
  add_descriptor_flags(p->evaluate, cfg, true);
  add_training_flags(p->evaluate, cfg);
  p->evaluate->add_option("--density", cfg.density, "Comma-separated density cells (default d,e,f,g,all)");
  p->evaluate->add_option("--seeds", cfg.seeds, "Repeat seeds, e.g. 0..9 or 1,5,7 (default 0..9)");
  p->evaluate->add_option("--report", cfg.report, "Output directory for report.json and ROC CSVs")->required();

  p->classify = p->app->add_subcommand("classify", "Classify patches with a trained bundle");
  p->classify->add_option("--bundle", cfg.bundle, "Bundle produced by train")->required();
  p->classify->add_option("--manifest", cfg.manifest, "CSV manifest of patches to classify");
  p->classify->add_option("--image", cfg.images, "Single image to classify (repeatable)");
  p->classify->add_option("--out", cfg.out, "Output CSV path (default stdout)");
  return p;
}

CLI::App * find_subcommand(Parser & p, std::string_view command)
{
  if (command.empty()) {
    return p.app.get();
  }
  return p.app->get_subcommand(std::string(command));
}

DescriptorConfig descriptor_config(const RunConfig & cfg, std::optional<double> sigma)
{
  DescriptorConfig d;
  d.tag = parse_descriptor_tag(cfg.descriptor);
  if (d.tag == DescriptorTag::HOT) {
    d.sigma = *sigma;
  }
  d.keep_fraction = cfg.keep_fraction;
  d.enhance = !cfg.no_enhance;
  d.response_rule = parse_response_rule(cfg.response_rule);
  d.histogram.cells_per_side = cfg.cells;
  d.histogram.block_side = cfg.block;
  d.histogram.bins = cfg.bins;
  return d;
}

TrainingConfig training_config(const RunConfig & cfg, std::optional<double> sigma)
{
  TrainingConfig t;
  t.descriptor = descriptor_config(cfg, sigma);
  t.svm.kernel.type = parse_kernel_type(cfg.kernel);
  t.svm.kernel.gamma = cfg.gamma;
  t.svm.C = cfg.C;
  t.svm.tol = cfg.tol;
  t.selection.search.cap = cfg.cap;
  t.selection.search.min_size = cfg.min_size;
  t.selection.inner_repeats = cfg.inner_repeats;
  t.selection.formula = parse_dp_formula(cfg.dp_formula);
  return t;
}

/// Descriptor-specific flag checks; returns the sigma values to run.
std::vector<double> check_descriptor_flags(const RunConfig & cfg, bool allow_sweep)
{
  if (cfg.descriptor == "hot") {
    if (cfg.sigma.empty()) {
      throw UsageError("--sigma is required for --descriptor hot");
    }
    std::vector<double> sigmas;
    try {
      sigmas = parse_sigma_list(cfg.sigma);
    } catch (const std::exception & error) {
      throw UsageError(error.what());
    }
    if (!allow_sweep && sigmas.size() != 1) {
      throw UsageError("--sigma takes a single value for this command");
    }
    return sigmas;
  }
  if (!cfg.sigma.empty()) {
    throw UsageError("--sigma only applies to --descriptor hot");
  }
  if (cfg.keep_fraction_set && cfg.descriptor != "pbdct") {
    throw UsageError("--keep-fraction only applies to --descriptor pbdct");
  }
  return {0.0};
}

std::optional<double> sigma_for(const RunConfig & cfg, double value)
{
  return cfg.descriptor == "hot" ? std::optional<double>(value) : std::nullopt;
}

Dataset load_slice(const RunConfig & cfg)
{
  const DensitySelector density = cfg.density.empty() ? DensitySelector::all : parse_density_selector(cfg.density);
  return density_slice(load_manifest(cfg.manifest), density);
}

void write_text(const std::string & path, const std::string & text, std::ostream & out)
{
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw IoError("cannot write " + path);
  }
  file << text;
}

int run_extract(const RunConfig & cfg)
{
  const auto sigmas = check_descriptor_flags(cfg, false);
  const DescriptorConfig descriptor = descriptor_config(cfg, sigma_for(cfg, sigmas.front()));
  const Dataset dataset = load_slice(cfg);
  const FeatureMatrix features = extract_matrix(dataset, descriptor);
  const bool binary = cfg.format.empty() ? std::filesystem::path(cfg.out).extension() == ".bin" : cfg.format == "bin";
  if (binary) {
    write_feature_binary(cfg.out, features);
  } else {
    std::vector<std::string> ids;
    for (const auto & record : dataset.records) {
      ids.push_back(record.id);
    }
    write_feature_csv(cfg.out, ids, features);
  }
  return 0;
}

int run_select(const RunConfig & cfg, std::ostream & out)
{
  const auto sigmas = check_descriptor_flags(cfg, false);
  const TrainingConfig training = training_config(cfg, sigma_for(cfg, sigmas.front()));
  const Stage stage = parse_stage(cfg.stage);
  const Dataset dataset = load_slice(cfg);
  Dataset members;
  std::vector<int> labels;
  for (const auto & record : dataset.records) {
    if (auto label = stage_label(stage, record.label)) {
      members.records.push_back(record);
      labels.push_back(*label);
    }
  }
  const FeatureMatrix features = extract_matrix(members, training.descriptor);
  const DpRanking ranking = dp_scores(features, labels, training.selection.formula);
  InnerCvEvaluator evaluator(features, labels, training.svm, cfg.seed, training.selection.inner_repeats);
  const SubsetSearchResult result = incremental_select(ranking, evaluator, training.selection.search);
  write_text(cfg.out, selection_report(ranking, result), out);
  return 0;
}

int run_train(const RunConfig & cfg, std::ostream & err)
{
  const auto sigmas = check_descriptor_flags(cfg, false);
  const TrainingConfig training = training_config(cfg, sigma_for(cfg, sigmas.front()));
  const DensitySelector density = cfg.density.empty() ? DensitySelector::all : parse_density_selector(cfg.density);
  const PipelineBundle bundle = train_pipeline(load_manifest(cfg.manifest), density, training, cfg.seed);
  for (const auto & warning : bundle.warnings) {
    err << nlohmann::json{{"warning", warning}}.dump() << '\n';
  }
  save_bundle(bundle, cfg.bundle);
  return 0;
}

std::vector<DensitySelector> parse_density_list(const std::string & text)
{
  if (text.empty()) {
    return {DensitySelector::d, DensitySelector::e, DensitySelector::f, DensitySelector::g, DensitySelector::all};
  }
  std::vector<DensitySelector> out;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    out.push_back(parse_density_selector(token));
  }
  return out;
}

std::string sigma_dir_name(double sigma)
{
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "sigma_%g", sigma);
  return buffer;
}

int run_evaluate(const RunConfig & cfg)
{
  const auto sigmas = check_descriptor_flags(cfg, true);
  std::vector<DensitySelector> densities;
  std::vector<std::uint64_t> seeds;
  try {
    densities = parse_density_list(cfg.density);
    seeds = parse_seed_list(cfg.seeds);
  } catch (const ParseError & error) {
    throw UsageError(error.what());
  }
  const Dataset dataset = load_manifest(cfg.manifest);
  const std::filesystem::path root(cfg.report);
  bool errored = false;
  nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
  for (double sigma : sigmas) {
    ProtocolConfig protocol;
    protocol.training = training_config(cfg, sigma_for(cfg, sigma));
    protocol.seeds = seeds;
    const EvaluationReport report = cross_validate(dataset, densities, protocol);
    errored = errored || report.any_error();
    const auto dir = sigmas.size() > 1 ? root / sigma_dir_name(sigma) : root;
    emit_report(report, dir);
    if (sigmas.size() > 1) {
      nlohmann::ordered_json cell;
      cell["sigma"] = sigma;
      cell["report"] = (std::filesystem::path(sigma_dir_name(sigma)) / "report.json").generic_string();
      nlohmann::ordered_json accuracy = nlohmann::ordered_json::object();
      for (const auto & c : report.cells) {
        const std::string key = std::string(to_string(c.density)) + "/" + std::string(to_string(c.stage));
        accuracy[key] = c.accuracy.mean ? nlohmann::ordered_json(*c.accuracy.mean) : nlohmann::ordered_json(nullptr);
      }
      cell["mean_accuracy"] = accuracy;
      sweep.push_back(cell);
    }
  }
  if (sigmas.size() > 1) {
    std::ofstream index(root / "sweep.json", std::ios::binary);
    if (!index) {
      throw IoError("cannot write " + (root / "sweep.json").string());
    }
    index << sweep.dump(2) << '\n';
  }
  return errored ? 1 : 0;
}

std::string format_score(double v)
{
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

int run_classify(const RunConfig & cfg, std::ostream & out)
{
  if (cfg.manifest.empty() == cfg.images.empty()) {
    throw UsageError("classify needs exactly one of --manifest or --image");
  }
  const PipelineBundle bundle = load_bundle(cfg.bundle);
  Dataset dataset;
  if (!cfg.manifest.empty()) {
    dataset = load_manifest(cfg.manifest);
  } else {
    for (const auto & path : cfg.images) {
      ImageD raw = read_image_8bit(path);
      dataset.records.push_back({path, ImagePatch(resize_bilinear(raw, kPatchSide, kPatchSide) / 255.0)});
    }
  }
  std::vector<Classification> results(dataset.size());
  parallel_for(dataset.size(), [&](std::size_t i) { results[i] = classify(bundle, dataset.records[i].patch); });
  std::string csv = "id,label,stage1_score,stage2_score\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    csv += dataset.records[i].id + "," + std::string(to_string(results[i].label)) + "," +
           format_score(results[i].stage1_score) + "," +
           (results[i].stage2_score ? format_score(*results[i].stage2_score) : std::string()) + "\n";
  }
  write_text(cfg.out, csv, out);
  return 0;
}

void report_error(std::ostream & err, std::string_view kind, std::string_view message)
{
  err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

std::vector<double> parse_sigma_list(const std::string & text)
{
  const auto dots = text.find("..");
  std::vector<double> out;
  if (dots == std::string::npos) {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) {
      throw ParseError("bad sigma \"" + text + "\"");
    }
    out.push_back(value);
    return out;
  }
  std::size_t used_lo = 0;
  std::size_t used_hi = 0;
  const std::string lo_text = text.substr(0, dots);
  const std::string hi_text = text.substr(dots + 2);
  const long lo = std::stol(lo_text, &used_lo);
  const long hi = std::stol(hi_text, &used_hi);
  if (used_lo != lo_text.size() || used_hi != hi_text.size() || hi < lo) {
    throw ParseError("bad sigma range \"" + text + "\"");
  }
  for (long v = lo; v <= hi; ++v) {
    out.push_back(static_cast<double>(v));
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string & text)
{
  std::vector<std::uint64_t> out;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      const auto dots = token.find("..");
      if (dots == std::string::npos) {
        out.push_back(std::stoull(token));
        continue;
      }
      const auto lo = std::stoull(token.substr(0, dots));
      const auto hi = std::stoull(token.substr(dots + 2));
      if (hi < lo) {
        throw ParseError("");
      }
      for (auto v = lo; v <= hi; ++v) {
        out.push_back(v);
      }
    } catch (...) {
      throw ParseError("bad seed list \"" + text + "\"");
    }
  }
  if (out.empty()) {
    throw ParseError("empty seed list");
  }
  return out;
}

std::vector<std::string> flag_names(std::string_view command)
{
  auto parser = make_parser();
  CLI::App * sub = find_subcommand(*parser, command);
  std::vector<std::string> names;
  for (const CLI::Option * option : sub->get_options()) {
    for (const auto & name : option->get_lnames()) {
      names.push_back("--" + name);
    }
  }
  return names;
}

std::string help_text(std::string_view command)
{
  auto parser = make_parser();
  CLI::App * sub = find_subcommand(*parser, command);
  return sub->help();
}

int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  auto parser = make_parser();
  try {
    parser->app->parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    const auto subs = parser->app->get_subcommands();
    out << (subs.empty() ? parser->app->help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << parser->app->help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError & error) {
    report_error(err, "usage", error.what());
    return 2;
  }

  const RunConfig & cfg = parser->cfg;
  try {
    if (parser->extract->parsed()) return run_extract(cfg);
    if (parser->select->parsed()) return run_select(cfg, out);
    if (parser->train->parsed()) return run_train(cfg, err);
    if (parser->evaluate->parsed()) return run_evaluate(cfg);
    if (parser->classify->parsed()) return run_classify(cfg, out);
  } catch (const UsageError & error) {
    report_error(err, "usage", error.what());
    return 2;
  } catch (const Error & error) {
    report_error(err, error.kind(), error.what());
    return 1;
  } catch (const std::exception & error) {
    report_error(err, "internal", error.what());
    return 1;
  }
  report_error(err, "usage", "no command given");
  return 2;
}

}  // namespace texdesc::cli
