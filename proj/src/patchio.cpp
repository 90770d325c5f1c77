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

#include "texdesc/patchio.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "texdesc/parallel.hpp"

namespace texdesc
{

std::string_view to_string(Density density)
{
  switch (density) {
    case Density::d: return "d";
    case Density::e: return "e";
    case Density::f: return "f";
    case Density::g: return "g";
  }
  return "?";
}

std::string_view to_string(DensitySelector density)
{
  if (density == DensitySelector::all) {
    return "all";
  }
  return to_string(static_cast<Density>(density));
}

std::string_view to_string(Label label)
{
  switch (label) {
    case Label::normal: return "normal";
    case Label::benign: return "benign";
    case Label::malignant: return "malignant";
  }
  return "?";
}

Density parse_density(std::string_view token)
{
  if (token == "d") return Density::d;
  if (token == "e") return Density::e;
  if (token == "f") return Density::f;
  if (token == "g") return Density::g;
  throw ParseError("unknown density token \"" + std::string(token) + "\"");
}

DensitySelector parse_density_selector(std::string_view token)
{
  if (token == "all") {
    return DensitySelector::all;
  }
  return static_cast<DensitySelector>(parse_density(token));
}

Label parse_label(std::string_view token)
{
  if (token == "normal") return Label::normal;
  if (token == "benign") return Label::benign;
  if (token == "malignant") return Label::malignant;
  throw ParseError("unknown label token \"" + std::string(token) + "\"");
}

namespace
{

std::string trim(std::string_view text)
{
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string & line)
{
  std::vector<std::string> cells;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) {
    cells.push_back(trim(cell));
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

bool has_extension(const std::filesystem::path & path, std::string_view ext)
{
  std::string actual = path.extension().string();
  std::transform(actual.begin(), actual.end(), actual.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return actual == ext;
}

ImageD read_png(const std::filesystem::path & path)
{
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw DecodeError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string message = image.message;
    png_image_free(&image);
    throw DecodeError("cannot decode PNG " + path.string() + ": " + message);
  }
  ImageD out(image.height, image.width);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      out(r, c) = buffer[static_cast<std::size_t>(r * out.cols() + c)];
    }
  }
  return out;
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
bool next_pgm_token(std::istream & in, std::string & token)
{
  token.clear();
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) {
        return true;
      }
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  return !token.empty();
}

ImageD read_pgm(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DecodeError("cannot open image " + path.string());
  }
  std::string magic, width_token, height_token, maxval_token;
  if (!next_pgm_token(in, magic) || (magic != "P5" && magic != "P2") ||
      !next_pgm_token(in, width_token) || !next_pgm_token(in, height_token) ||
      !next_pgm_token(in, maxval_token))
  {
    throw DecodeError("not a PGM image: " + path.string());
  }
  long width = 0, height = 0, maxval = 0;
  try {
    width = std::stol(width_token);
    height = std::stol(height_token);
    maxval = std::stol(maxval_token);
  } catch (...) {
    throw DecodeError("malformed PGM header in " + path.string());
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    throw DecodeError("unsupported PGM (need 8-bit grayscale): " + path.string());
  }
  ImageD out(height, width);
  const double scale = 255.0 / static_cast<double>(maxval);
  if (magic == "P5") {
    std::vector<unsigned char> buffer(static_cast<std::size_t>(width * height));
    in.read(reinterpret_cast<char *>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
    if (in.gcount() != static_cast<std::streamsize>(buffer.size())) {
      throw DecodeError("truncated PGM payload in " + path.string());
    }
    for (long i = 0; i < width * height; ++i) {
      out(i / width, i % width) = buffer[static_cast<std::size_t>(i)] * scale;
    }
  } else {
    std::string token;
    for (long i = 0; i < width * height; ++i) {
      if (!next_pgm_token(in, token)) {
        throw DecodeError("truncated PGM payload in " + path.string());
      }
      out(i / width, i % width) = std::stod(token) * scale;
    }
  }
  return out;
}

}  // namespace

ImageD read_image_8bit(const std::filesystem::path & path)
{
  if (!std::filesystem::exists(path)) {
    throw DecodeError("image not found: " + path.string());
  }
  if (has_extension(path, ".png")) {
    return read_png(path);
  }
  return read_pgm(path);
}

void write_image_8bit(const std::filesystem::path & path, const ImageD & unit_image)
{
  std::vector<unsigned char> bytes(static_cast<std::size_t>(unit_image.size()));
  for (Eigen::Index r = 0; r < unit_image.rows(); ++r) {
    for (Eigen::Index c = 0; c < unit_image.cols(); ++c) {
      const double v = std::clamp(unit_image(r, c), 0.0, 1.0);
      bytes[static_cast<std::size_t>(r * unit_image.cols() + c)] =
        static_cast<unsigned char>(std::lround(v * 255.0));
    }
  }
  if (!path.parent_path().empty()) {
    std::filesystem::create_directories(path.parent_path());
  }
  if (has_extension(path, ".png")) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(unit_image.cols());
    image.height = static_cast<png_uint_32>(unit_image.rows());
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
      throw IoError("cannot write PNG " + path.string() + ": " + image.message);
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write image " + path.string());
  }
  out << "P5\n" << unit_image.cols() << ' ' << unit_image.rows() << "\n255\n";
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ImageD resize_bilinear(const ImageD & image, Eigen::Index rows, Eigen::Index cols)
{
  if (image.rows() == rows && image.cols() == cols) {
    return image;
  }
  ImageD out(rows, cols);
  const double sy = static_cast<double>(image.rows()) / static_cast<double>(rows);
  const double sx = static_cast<double>(image.cols()) / static_cast<double>(cols);
  const Eigen::Index max_r = image.rows() - 1;
  const Eigen::Index max_c = image.cols() - 1;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double y = std::clamp((r + 0.5) * sy - 0.5, 0.0, static_cast<double>(max_r));
    const auto y0 = static_cast<Eigen::Index>(std::floor(y));
    const Eigen::Index y1 = std::min(y0 + 1, max_r);
    const double wy = y - static_cast<double>(y0);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double x = std::clamp((c + 0.5) * sx - 0.5, 0.0, static_cast<double>(max_c));
      const auto x0 = static_cast<Eigen::Index>(std::floor(x));
      const Eigen::Index x1 = std::min(x0 + 1, max_c);
      const double wx = x - static_cast<double>(x0);
      const double top = image(y0, x0) * (1.0 - wx) + image(y0, x1) * wx;
      const double bottom = image(y1, x0) * (1.0 - wx) + image(y1, x1) * wx;
      out(r, c) = top * (1.0 - wy) + bottom * wy;
    }
  }
  return out;
}

Dataset load_manifest(const std::filesystem::path & manifest)
{
  std::ifstream in(manifest);
  if (!in) {
    throw IoError("cannot open manifest " + manifest.string());
  }
  const auto base = manifest.parent_path();

  struct Row
  {
    std::size_t line;
    std::string path;
    Density density;
    Label label;
  };
  std::vector<Row> rows;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    auto cells = split_row(line);
    if (!header_seen) {
      header_seen = true;
      if (!cells.empty() && !cells[0].empty() && cells[0].front() == '\xEF') {
        cells[0].erase(0, 3);  // UTF-8 BOM
      }
      if (cells.size() != 3 || cells[0] != "path" || cells[1] != "density" || cells[2] != "label") {
        throw ParseError("manifest header must be path,density,label (row 1)");
      }
      continue;
    }
    if (cells.size() != 3) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 columns");
    }
    Row row{line_no, cells[0], Density::d, Label::normal};
    try {
      row.density = parse_density(cells[1]);
      row.label = parse_label(cells[2]);
    } catch (const ParseError & error) {
      throw ParseError("line " + std::to_string(line_no) + ": " + error.what());
    }
    if (!seen.insert(row.path).second) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate id \"" + row.path + "\"");
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) {
    throw ParseError("manifest is empty: " + manifest.string());
  }

  for (const auto & row : rows) {
    const auto resolved = base / row.path;
    if (!std::filesystem::exists(resolved)) {
      throw IoError("line " + std::to_string(row.line) + ": missing file " + resolved.string());
    }
  }

  Dataset dataset;
  dataset.records.resize(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    ImageD raw = read_image_8bit(base / rows[i].path);
    ImageD sized = resize_bilinear(raw, kPatchSide, kPatchSide) / 255.0;
    dataset.records[i] = PatchRecord{rows[i].path, ImagePatch(std::move(sized)), rows[i].density, rows[i].label};
  });
  return dataset;
}

std::filesystem::path write_dataset(const Dataset & dataset, const std::filesystem::path & dir)
{
  std::filesystem::create_directories(dir);
  const auto manifest = dir / "manifest.csv";
  std::ofstream out(manifest);
  if (!out) {
    throw IoError("cannot write manifest " + manifest.string());
  }
  out << "path,density,label\n";
  for (const auto & record : dataset.records) {
    write_image_8bit(dir / record.id, record.patch.pixels());
    out << record.id << ',' << to_string(record.density) << ',' << to_string(record.label) << '\n';
  }
  return manifest;
}

Dataset density_slice(const Dataset & dataset, DensitySelector selector)
{
  if (selector == DensitySelector::all) {
    return dataset;
  }
  Dataset out;
  for (const auto & record : dataset.records) {
    if (matches(selector, record.density)) {
      out.records.push_back(record);
    }
  }
  return out;
}

}  // namespace texdesc
