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

#include "texdesc/features_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "texdesc/bytes.hpp"

namespace texdesc
{

namespace
{

std::string read_all(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

void write_feature_csv(
  const std::filesystem::path & path, const std::vector<std::string> & ids, const FeatureMatrix & features)
{
  if (static_cast<Eigen::Index>(ids.size()) != features.rows()) {
    throw ConfigError("feature CSV: id count does not match row count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << "id";
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    out << ",f" << c;
  }
  out << '\n';
  char buffer[32];
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    out << ids[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", features(r, c));
      out << ',' << buffer;
    }
    out << '\n';
  }
}

LabeledFeatures read_feature_csv(const std::filesystem::path & path)
{
  std::istringstream in(read_all(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("id", 0) != 0) {
    throw ParseError("feature CSV must start with an id,f0,... header: " + path.string());
  }
  const auto cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));
  LabeledFeatures out;
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) {
      continue;
    }
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    out.ids.push_back(cell);
    Eigen::Index count = 0;
    while (std::getline(cells, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (...) {
        throw ParseError("row " + std::to_string(row) + ": bad number \"" + cell + "\"");
      }
      ++count;
    }
    if (count != cols) {
      throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(cols) + " values");
    }
  }
  out.features = Eigen::Map<const FeatureMatrix>(values.data(), static_cast<Eigen::Index>(out.ids.size()), cols);
  return out;
}

void write_feature_binary(const std::filesystem::path & path, const FeatureMatrix & features)
{
  std::string blob = "TXD1";
  bytes::put(blob, static_cast<std::uint32_t>(features.rows()));
  bytes::put(blob, static_cast<std::uint32_t>(features.cols()));
  for (Eigen::Index i = 0; i < features.size(); ++i) {
    bytes::put(blob, features.data()[i]);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
}

FeatureMatrix read_feature_binary(const std::filesystem::path & path)
{
  const std::string blob = read_all(path);
  bytes::Reader reader(blob);
  if (reader.take(4, "magic") != "TXD1") {
    throw FormatError("bad feature matrix magic", 0);
  }
  const auto rows = reader.get<std::uint32_t>("row count");
  const auto cols = reader.get<std::uint32_t>("column count");
  FeatureMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out.data()[i] = reader.get<double>("payload");
  }
  if (!reader.at_end()) {
    throw FormatError("trailing bytes after feature payload", reader.offset());
  }
  return out;
}

}  // namespace texdesc
