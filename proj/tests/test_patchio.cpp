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

#include "test_util.hpp"
#include "texdesc/error.hpp"
#include "texdesc/patchio.hpp"

using namespace texdesc;

namespace
{

ImageD gradient_image(Eigen::Index rows, Eigen::Index cols)
{
  ImageD image(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      image(r, c) = static_cast<double>((r * 7 + c * 3) % 256) / 255.0;
    }
  }
  return image;
}

}  // namespace

TEST_CASE("PGM and PNG round trip 8-bit values")
{
  test::TempDir dir("patchio");
  const ImageD image = gradient_image(20, 30);
  for (const char * name : {"a.pgm", "a.png"}) {
    write_image_8bit(dir / name, image);
    const ImageD back = read_image_8bit(dir / name);
    REQUIRE(back.rows() == 20);
    REQUIRE(back.cols() == 30);
    CHECK((back - image * 255.0).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("ASCII PGM with comments decodes")
{
  test::TempDir dir("pgm");
  test::write_file(dir / "p2.pgm", "P2\n# comment\n3 2\n# another\n255\n0 128 255\n10 20 30\n");
  const ImageD image = read_image_8bit(dir / "p2.pgm");
  REQUIRE(image.rows() == 2);
  CHECK(image(0, 1) == 128.0);
  CHECK(image(1, 2) == 30.0);
}

TEST_CASE("undecodable image raises a decode error naming the path")
{
  test::TempDir dir("bad");
  test::write_file(dir / "junk.png", "not an image at all");
  try {
    read_image_8bit(dir / "junk.png");
    FAIL("expected DecodeError");
  } catch (const DecodeError & error) {
    CHECK(std::string(error.what()).find("junk.png") != std::string::npos);
  }
}

TEST_CASE("bilinear resize keeps constants and exact size")
{
  const ImageD constant = ImageD::Constant(50, 70, 0.25);
  const ImageD out = resize_bilinear(constant, 128, 128);
  CHECK(out.rows() == 128);
  CHECK(out.cols() == 128);
  CHECK((out.array() - 0.25).abs().maxCoeff() < 1e-15);
  const ImageD same = resize_bilinear(gradient_image(16, 16), 16, 16);
  CHECK((same - gradient_image(16, 16)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("single-row manifest loads a 128x128 unit-range patch")
{
  test::TempDir dir("manifest1");
  write_image_8bit(dir / "p.png", gradient_image(128, 128));
  test::write_file(dir / "m.csv", "path,density,label\np.png,d,normal\n");
  const Dataset ds = load_manifest(dir / "m.csv");
  REQUIRE(ds.size() == 1);
  CHECK(ds.records[0].density == Density::d);
  CHECK(ds.records[0].label == Label::normal);
  CHECK(ds.records[0].id == "p.png");
  CHECK(ds.records[0].patch.rows() == 128);
  CHECK(ds.records[0].patch.pixels().maxCoeff() <= 1.0);
  CHECK(ds.records[0].patch.pixels().minCoeff() >= 0.0);
}

TEST_CASE("images of other sizes are resampled to 128x128")
{
  test::TempDir dir("resize");
  write_image_8bit(dir / "small.pgm", gradient_image(40, 60));
  test::write_file(dir / "m.csv", "path,density,label\nsmall.pgm,g,benign\n");
  const Dataset ds = load_manifest(dir / "m.csv");
  CHECK(ds.records[0].patch.rows() == kPatchSide);
  CHECK(ds.records[0].patch.cols() == kPatchSide);
}

TEST_CASE("manifest errors name the offending row or token")
{
  test::TempDir dir("manifest_err");
  write_image_8bit(dir / "p.pgm", gradient_image(8, 8));

  test::write_file(dir / "density.csv", "path,density,label\np.pgm,x,normal\n");
  try {
    load_manifest(dir / "density.csv");
    FAIL("expected ParseError");
  } catch (const ParseError & error) {
    CHECK(std::string(error.what()).find("\"x\"") != std::string::npos);
  }

  test::write_file(dir / "label.csv", "path,density,label\np.pgm,d,weird\n");
  CHECK_THROWS_AS(load_manifest(dir / "label.csv"), ParseError);

  test::write_file(dir / "missing.csv", "path,density,label\np.pgm,d,normal\nnope.pgm,d,normal\n");
  try {
    load_manifest(dir / "missing.csv");
    FAIL("expected IoError");
  } catch (const IoError & error) {
    CHECK(std::string(error.what()).find("line 3") != std::string::npos);
  }

  CHECK_THROWS_AS(load_manifest(dir / "absent.csv"), IoError);
}

TEST_CASE("per-label and per-density counts survive loading and slicing")
{
  // 12/14/11, 28/1/5, 24/8/6, 26/9/6 normal/benign/malignant per density.
  const int counts[4][3] = {{12, 14, 11}, {28, 1, 5}, {24, 8, 6}, {26, 9, 6}};
  const char * densities[4] = {"d", "e", "f", "g"};
  const char * labels[3] = {"normal", "benign", "malignant"};
  test::TempDir dir("counts");
  write_image_8bit(dir / "img.pgm", gradient_image(16, 16));
  std::string manifest = "path,density,label\n";
  int n = 0;
  for (int d = 0; d < 4; ++d) {
    for (int l = 0; l < 3; ++l) {
      for (int k = 0; k < counts[d][l]; ++k) {
        const std::string name = "p" + std::to_string(n++) + ".pgm";
        std::filesystem::copy_file(dir / "img.pgm", dir / name);
        manifest += name + "," + densities[d] + "," + labels[l] + "\n";
      }
    }
  }
  test::write_file(dir / "m.csv", manifest);
  const Dataset ds = load_manifest(dir / "m.csv");
  REQUIRE(ds.size() == 150);
  int per_label[3] = {0, 0, 0};
  for (const auto & r : ds.records) {
    ++per_label[static_cast<int>(r.label)];
  }
  CHECK(per_label[0] == 90);
  CHECK(per_label[1] == 32);
  CHECK(per_label[2] == 28);

  CHECK(density_slice(ds, DensitySelector::e).size() == 34);
  CHECK(density_slice(ds, DensitySelector::all).size() == 150);
  const Dataset d_only = density_slice(ds, DensitySelector::d);
  CHECK(density_slice(d_only, DensitySelector::g).empty());
  // Order is preserved.
  const Dataset g = density_slice(ds, DensitySelector::g);
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(std::stoi(g.records[i - 1].id.substr(1)) < std::stoi(g.records[i].id.substr(1)));
  }
}

TEST_CASE("write_dataset output reloads to the same records")
{
  test::TempDir dir("write_ds");
  Dataset ds;
  ds.records.push_back({"a.pgm", ImagePatch(gradient_image(128, 128)), Density::f, Label::malignant});
  ds.records.push_back({"b.pgm", ImagePatch(ImageD::Constant(128, 128, 0.5)), Density::e, Label::benign});
  const auto manifest = write_dataset(ds, dir.path());
  const Dataset back = load_manifest(manifest);
  REQUIRE(back.size() == 2);
  CHECK(back.records[0].density == Density::f);
  CHECK(back.records[1].label == Label::benign);
  CHECK((back.records[0].patch.pixels() - ds.records[0].patch.pixels()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ImagePatch rejects tiny or non-finite pixels")
{
  CHECK_THROWS_AS(ImagePatch(ImageD::Zero(2, 5)), DomainError);
  ImageD bad = ImageD::Zero(4, 4);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ImagePatch{bad}, DomainError);
}
