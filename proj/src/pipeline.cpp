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

#include "texdesc/pipeline.hpp"

#include <fstream>
#include <iterator>

#include <json.hpp>

#include "texdesc/bytes.hpp"
#include "texdesc/random.hpp"

namespace texdesc
{

using nlohmann::ordered_json;

std::string_view to_string(Stage stage)
{
  return stage == Stage::normal_abnormal ? "normal_abnormal" : "benign_malignant";
}

Stage parse_stage(std::string_view token)
{
  if (token == "normal_abnormal" || token == "1") return Stage::normal_abnormal;
  if (token == "benign_malignant" || token == "2") return Stage::benign_malignant;
  throw ParseError("unknown stage \"" + std::string(token) + "\"");
}

std::string_view to_string(PredictedLabel label)
{
  switch (label) {
    case PredictedLabel::normal: return "normal";
    case PredictedLabel::benign: return "benign";
    case PredictedLabel::malignant: return "malignant";
    case PredictedLabel::abnormal: return "abnormal";
  }
  return "?";
}

std::optional<int> stage_label(Stage stage, Label label)
{
  if (stage == Stage::normal_abnormal) {
    return label == Label::normal ? 0 : 1;
  }
  if (label == Label::normal) {
    return std::nullopt;
  }
  return label == Label::malignant ? 1 : 0;
}

FeatureMatrix select_columns(const Eigen::Ref<const FeatureMatrix> & features,
                             std::span<const Eigen::Index> indices)
{
  FeatureMatrix out(features.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = features.col(indices[k]);
  }
  return out;
}

StageModel train_stage(const Eigen::Ref<const FeatureMatrix> & features, std::span<const int> labels, Stage stage,
                       const TrainingConfig & config, std::uint64_t seed)
{
  const DpRanking ranking = dp_scores(features, labels, config.selection.formula);
  InnerCvEvaluator evaluator(features, labels, config.svm, mix_seed(seed, 1), config.selection.inner_repeats);
  SearchOptions search = config.selection.search;
  if (search.cap > static_cast<std::size_t>(features.cols())) {
    search.cap = static_cast<std::size_t>(features.cols());
  }
  const SubsetSearchResult subset = incremental_select(ranking, evaluator, search);

  StageModel model;
  model.stage = stage;
  model.descriptor = config.descriptor;
  model.selected_indices = subset.selected_indices;
  model.svm = train_svm(select_columns(features, model.selected_indices), labels, config.svm);
  return model;
}

namespace
{

struct StageData
{
  FeatureMatrix features;
  std::vector<int> labels;
};

bool both_classes_have(const std::vector<int> & labels, long minimum)
{
  const long positives = std::count(labels.begin(), labels.end(), 1);
  const long negatives = static_cast<long>(labels.size()) - positives;
  return positives >= minimum && negatives >= minimum;
}

double stage_score(const StageModel & model, const Eigen::VectorXd & values)
{
  Eigen::VectorXd picked(static_cast<Eigen::Index>(model.selected_indices.size()));
  for (std::size_t k = 0; k < model.selected_indices.size(); ++k) {
    const Eigen::Index index = model.selected_indices[k];
    if (index < 0 || index >= values.size()) {
      throw ConfigError("selected feature index outside the descriptor");
    }
    picked(static_cast<Eigen::Index>(k)) = values(index);
  }
  return decision(model.svm, picked).raw;
}

}  // namespace

PipelineBundle train_pipeline(const Dataset & dataset, DensitySelector density, const TrainingConfig & config,
                              std::uint64_t seed, const RecordObserver & observer)
{
  const Dataset slice = density_slice(dataset, density);
  if (slice.empty()) {
    throw TrainingError("density slice " + std::string(to_string(density)) + " is empty");
  }
  if (observer) {
    for (const auto & record : slice.records) {
      observer(record);
    }
  }
  const FeatureMatrix features = extract_matrix(slice, config.descriptor);

  PipelineBundle bundle;
  bundle.density = density;
  bundle.config = config;

  std::vector<int> stage1_labels;
  for (const auto & record : slice.records) {
    stage1_labels.push_back(*stage_label(Stage::normal_abnormal, record.label));
  }
  if (!both_classes_have(stage1_labels, 2)) {
    throw TrainingError("stage normal_abnormal needs at least 2 normal and 2 abnormal records in slice " +
                        std::string(to_string(density)));
  }
  bundle.stage1 = train_stage(features, stage1_labels, Stage::normal_abnormal, config, mix_seed(seed, 1));

  std::vector<Eigen::Index> abnormal_rows;
  std::vector<int> stage2_labels;
  for (std::size_t i = 0; i < slice.size(); ++i) {
    if (auto label = stage_label(Stage::benign_malignant, slice.records[i].label)) {
      abnormal_rows.push_back(static_cast<Eigen::Index>(i));
      stage2_labels.push_back(*label);
    }
  }
  if (!both_classes_have(stage2_labels, 2)) {
    const long malignant = std::count(stage2_labels.begin(), stage2_labels.end(), 1);
    bundle.warnings.push_back(
      "stage benign_malignant untrainable in slice " + std::string(to_string(density)) + ": " +
      std::to_string(static_cast<long>(stage2_labels.size()) - malignant) + " benign, " + std::to_string(malignant) +
      " malignant (need at least 2 each)");
    return bundle;
  }
  FeatureMatrix abnormal(static_cast<Eigen::Index>(abnormal_rows.size()), features.cols());
  for (std::size_t k = 0; k < abnormal_rows.size(); ++k) {
    abnormal.row(static_cast<Eigen::Index>(k)) = features.row(abnormal_rows[k]);
  }
  bundle.stage2 = train_stage(abnormal, stage2_labels, Stage::benign_malignant, config, mix_seed(seed, 2));
  return bundle;
}

Classification classify(const PipelineBundle & bundle, const FeatureVector & features)
{
  const std::string expected = bundle.config.descriptor.digest();
  if (features.params_digest != expected) {
    throw ConfigError("descriptor digest " + features.params_digest + " does not match bundle digest " + expected);
  }
  Classification out;
  out.stage1_score = stage_score(bundle.stage1, features.values);
  if (out.stage1_score < 0.0) {
    out.label = PredictedLabel::normal;
    return out;
  }
  if (!bundle.stage2) {
    out.label = PredictedLabel::abnormal;
    return out;
  }
  out.stage2_score = stage_score(*bundle.stage2, features.values);
  out.label = *out.stage2_score >= 0.0 ? PredictedLabel::malignant : PredictedLabel::benign;
  return out;
}

Classification classify(const PipelineBundle & bundle, const ImagePatch & patch)
{
  return classify(bundle, extract_features(patch, bundle.config.descriptor));
}

// Serialization

namespace
{

ordered_json descriptor_to_json(const DescriptorConfig & cfg)
{
  return ordered_json{
    {"tag", to_string(cfg.tag)},
    {"sigma", cfg.sigma},
    {"keep_fraction", cfg.keep_fraction},
    {"cells_per_side", cfg.histogram.cells_per_side},
    {"block_side", cfg.histogram.block_side},
    {"bins", cfg.histogram.bins},
    {"epsilon", cfg.histogram.epsilon},
    {"response_rule", to_string(cfg.response_rule)},
    {"enhance", cfg.enhance},
    {"digest", cfg.digest()},
  };
}

DescriptorConfig descriptor_from_json(const ordered_json & j)
{
  DescriptorConfig cfg;
  cfg.tag = parse_descriptor_tag(j.at("tag").get<std::string>());
  cfg.sigma = j.at("sigma").get<double>();
  cfg.keep_fraction = j.at("keep_fraction").get<double>();
  cfg.histogram.cells_per_side = j.at("cells_per_side").get<int>();
  cfg.histogram.block_side = j.at("block_side").get<int>();
  cfg.histogram.bins = j.at("bins").get<int>();
  cfg.histogram.epsilon = j.at("epsilon").get<double>();
  cfg.response_rule = parse_response_rule(j.at("response_rule").get<std::string>());
  cfg.enhance = j.at("enhance").get<bool>();
  return cfg;
}

ordered_json training_to_json(const TrainingConfig & cfg)
{
  return ordered_json{
    {"descriptor", descriptor_to_json(cfg.descriptor)},
    {"svm",
     {{"kernel", to_string(cfg.svm.kernel.type)},
      {"gamma", cfg.svm.kernel.gamma},
      {"C", cfg.svm.C},
      {"tol", cfg.svm.tol},
      {"max_passes", cfg.svm.max_passes}}},
    {"selection",
     {{"min_size", cfg.selection.search.min_size},
      {"cap", cfg.selection.search.cap},
      {"inner_repeats", cfg.selection.inner_repeats},
      {"formula", to_string(cfg.selection.formula)}}},
  };
}

TrainingConfig training_from_json(const ordered_json & j)
{
  TrainingConfig cfg;
  cfg.descriptor = descriptor_from_json(j.at("descriptor"));
  const auto & svm = j.at("svm");
  cfg.svm.kernel.type = parse_kernel_type(svm.at("kernel").get<std::string>());
  cfg.svm.kernel.gamma = svm.at("gamma").get<double>();
  cfg.svm.C = svm.at("C").get<double>();
  cfg.svm.tol = svm.at("tol").get<double>();
  cfg.svm.max_passes = svm.at("max_passes").get<long>();
  const auto & sel = j.at("selection");
  cfg.selection.search.min_size = sel.at("min_size").get<std::size_t>();
  cfg.selection.search.cap = sel.at("cap").get<std::size_t>();
  cfg.selection.inner_repeats = sel.at("inner_repeats").get<int>();
  cfg.selection.formula = parse_dp_formula(sel.at("formula").get<std::string>());
  return cfg;
}

void append(std::vector<double> & payload, const Eigen::Ref<const Eigen::VectorXd> & values)
{
  payload.insert(payload.end(), values.data(), values.data() + values.size());
}

ordered_json stage_to_json(const StageModel & model, std::vector<double> & payload)
{
  const SvmModel & svm = model.svm;
  ordered_json j{
    {"stage", to_string(model.stage)},
    {"descriptor_digest", model.descriptor.digest()},
    {"selected_indices", model.selected_indices},
    {"kernel", to_string(svm.kernel.type)},
    {"gamma", svm.kernel.gamma},
    {"C", svm.C},
    {"tol", svm.tol},
    {"kkt_residual", svm.kkt_residual},
    {"iterations", svm.iterations},
    {"converged", svm.converged},
    {"dimension", svm.dimension()},
    {"support_vectors", svm.support_vectors.rows()},
    {"payload_offset", payload.size()},
  };
  // mean, scale, support vectors (row-major), dual coefficients, bias
  append(payload, svm.standardization.mean);
  append(payload, svm.standardization.scale);
  payload.insert(payload.end(), svm.support_vectors.data(),
                 svm.support_vectors.data() + svm.support_vectors.size());
  append(payload, svm.dual_coeffs);
  payload.push_back(svm.bias);
  return j;
}

StageModel stage_from_json(const ordered_json & j, const DescriptorConfig & descriptor,
                           const std::vector<double> & payload, std::size_t payload_start)
{
  StageModel model;
  model.stage = parse_stage(j.at("stage").get<std::string>());
  model.descriptor = descriptor;
  if (j.at("descriptor_digest").get<std::string>() != descriptor.digest()) {
    throw FormatError("stage descriptor digest does not match the bundle configuration", payload_start);
  }
  model.selected_indices = j.at("selected_indices").get<std::vector<Eigen::Index>>();
  SvmModel & svm = model.svm;
  svm.kernel.type = parse_kernel_type(j.at("kernel").get<std::string>());
  svm.kernel.gamma = j.at("gamma").get<double>();
  svm.C = j.at("C").get<double>();
  svm.tol = j.at("tol").get<double>();
  svm.kkt_residual = j.at("kkt_residual").get<double>();
  svm.iterations = j.at("iterations").get<long>();
  svm.converged = j.at("converged").get<bool>();
  const auto dim = j.at("dimension").get<Eigen::Index>();
  const auto nsv = j.at("support_vectors").get<Eigen::Index>();
  const auto offset = j.at("payload_offset").get<std::size_t>();
  if (dim != static_cast<Eigen::Index>(model.selected_indices.size())) {
    throw FormatError("stage dimension does not match its selected feature count", payload_start);
  }
  const std::size_t needed = static_cast<std::size_t>(2 * dim + nsv * dim + nsv + 1);
  if (dim < 0 || nsv < 0 || offset > payload.size() || payload.size() - offset < needed) {
    throw FormatError("stage payload extends past the end of the weights", payload_start + 8 * payload.size());
  }
  const double * p = payload.data() + offset;
  svm.standardization.mean = Eigen::Map<const Eigen::VectorXd>(p, dim);
  p += dim;
  svm.standardization.scale = Eigen::Map<const Eigen::VectorXd>(p, dim);
  p += dim;
  svm.support_vectors = Eigen::Map<const FeatureMatrix>(p, nsv, dim);
  p += nsv * dim;
  svm.dual_coeffs = Eigen::Map<const Eigen::VectorXd>(p, nsv);
  p += nsv;
  svm.bias = *p;
  return model;
}

std::string payload_digest(const std::vector<double> & payload)
{
  return fnv1a_hex(std::string_view(reinterpret_cast<const char *>(payload.data()), payload.size() * sizeof(double)));
}

}  // namespace

std::string serialize_bundle(const PipelineBundle & bundle)
{
  std::vector<double> payload;
  ordered_json header{
    {"format", "texdesc-bundle"},
    {"density", to_string(bundle.density)},
    {"config", training_to_json(bundle.config)},
  };
  header["stage1"] = stage_to_json(bundle.stage1, payload);
  header["stage2"] = bundle.stage2 ? stage_to_json(*bundle.stage2, payload) : ordered_json(nullptr);
  header["warnings"] = bundle.warnings;
  header["payload_digest"] = payload_digest(payload);
  const std::string text = header.dump();

  std::string blob = "TXPB";
  bytes::put(blob, kBundleVersion);
  bytes::put(blob, static_cast<std::uint32_t>(text.size()));
  blob += text;
  bytes::put(blob, static_cast<std::uint64_t>(payload.size()));
  for (double v : payload) {
    bytes::put(blob, v);
  }
  return blob;
}

PipelineBundle deserialize_bundle(std::string_view blob)
{
  bytes::Reader reader(blob);
  if (reader.take(4, "magic") != "TXPB") {
    throw FormatError("not a texdesc bundle (bad magic)", 0);
  }
  const auto version = reader.get<std::uint16_t>("version");
  if (version != kBundleVersion) {
    throw VersionError("bundle version " + std::to_string(version) + " is not supported (this build reads version " +
                       std::to_string(kBundleVersion) + ")");
  }
  const auto header_len = reader.get<std::uint32_t>("header length");
  const std::size_t header_at = reader.offset();
  const std::string_view text = reader.take(header_len, "header");
  const auto count = reader.get<std::uint64_t>("payload count");
  const std::size_t payload_at = reader.offset();
  if ((blob.size() - payload_at) / 8 < count) {
    throw FormatError("truncated weight payload", blob.size());
  }
  std::vector<double> payload(static_cast<std::size_t>(count));
  for (auto & v : payload) {
    v = reader.get<double>("payload");
  }
  if (!reader.at_end()) {
    throw FormatError("trailing bytes after weight payload", reader.offset());
  }

  ordered_json header;
  try {
    header = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error & error) {
    throw FormatError(std::string("malformed bundle header: ") + error.what(), header_at + error.byte);
  }
  try {
    if (header.at("payload_digest").get<std::string>() != payload_digest(payload)) {
      throw FormatError("weight payload digest mismatch", payload_at);
    }
    PipelineBundle bundle;
    bundle.density = parse_density_selector(header.at("density").get<std::string>());
    bundle.config = training_from_json(header.at("config"));
    if (header.at("config").at("descriptor").at("digest").get<std::string>() != bundle.config.descriptor.digest()) {
      throw FormatError("descriptor digest mismatch in bundle header", header_at);
    }
    bundle.stage1 = stage_from_json(header.at("stage1"), bundle.config.descriptor, payload, payload_at);
    if (!header.at("stage2").is_null()) {
      bundle.stage2 = stage_from_json(header.at("stage2"), bundle.config.descriptor, payload, payload_at);
    }
    bundle.warnings = header.at("warnings").get<std::vector<std::string>>();
    return bundle;
  } catch (const nlohmann::json::exception & error) {
    throw FormatError(std::string("invalid bundle header: ") + error.what(), header_at);
  } catch (const ParseError & error) {
    throw FormatError(std::string("invalid bundle header: ") + error.what(), header_at);
  }
}

void save_bundle(const PipelineBundle & bundle, const std::filesystem::path & path)
{
  const std::string blob = serialize_bundle(bundle);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write bundle " + path.string());
  }
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) {
    throw IoError("failed writing bundle " + path.string());
  }
}

PipelineBundle load_bundle(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open bundle " + path.string());
  }
  const std::string blob(std::istreambuf_iterator<char>(in), {});
  return deserialize_bundle(blob);
}

}  // namespace texdesc
