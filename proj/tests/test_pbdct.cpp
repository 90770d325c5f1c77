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

#include "oracles.hpp"
#include "test_util.hpp"
#include "texdesc/error.hpp"
#include "texdesc/pbdct.hpp"

using namespace texdesc;

TEST_CASE("constant image has a single DC coefficient")
{
  const ImageD coeffs = dct2(ImageD::Ones(4, 4));
  // Orthonormal scaling: F(0,0) = sqrt(MN) * value.
  CHECK(coeffs(0, 0) == doctest::Approx(4.0));
  ImageD rest = coeffs;
  rest(0, 0) = 0.0;
  CHECK(rest.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dct2 matches the direct double sum")
{
  Rng rng(1);
  for (Eigen::Index n : {8, 16}) {
    for (int trial = 0; trial < 5; ++trial) {
      const ImageD image = test::random_image(rng, n, n);
      CHECK((dct2(image) - oracle::dct_direct(image)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  const ImageD rect = test::random_image(rng, 6, 10);
  CHECK((dct2(rect) - oracle::dct_direct(rect)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("inverse, energy and linearity")
{
  Rng rng(2);
  const ImageD p = test::random_image(rng, 16, 16);
  const ImageD q = test::random_image(rng, 16, 16);
  CHECK((idct2(dct2(p)) - p).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(dct2(p).squaredNorm() - p.squaredNorm()) < 1e-9 * p.squaredNorm());
  const ImageD combined = dct2((2.5 * p - 0.75 * q).eval());
  CHECK((combined - (2.5 * dct2(p) - 0.75 * dct2(q))).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("band mask walks anti-diagonals by increasing u")
{
  const BandMask small = band_mask(4, 4, 0.25);
  const std::vector<std::pair<Eigen::Index, Eigen::Index>> expected{{0, 0}, {0, 1}, {1, 0}, {0, 2}};
  CHECK(small.kept_indices == expected);
  CHECK(band_mask(128, 128, 0.5).pool_size() == 8192);

  const BandMask full = band_mask(5, 3, 1.0);
  REQUIRE(full.pool_size() == 15);
  for (std::size_t i = 1; i < full.pool_size(); ++i) {
    const auto [u0, v0] = full.kept_indices[i - 1];
    const auto [u1, v1] = full.kept_indices[i];
    CHECK((u0 + v0 < u1 + v1 || (u0 + v0 == u1 + v1 && u0 < u1)));
  }
}

TEST_CASE("band mask rejects keep fractions outside (0,1]")
{
  CHECK_THROWS_AS(band_mask(8, 8, 0.0), DomainError);
  CHECK_THROWS_AS(band_mask(8, 8, 1.5), DomainError);
  CHECK_THROWS_AS(band_mask(8, 8, -0.1), DomainError);
}

TEST_CASE("pass-band vector reads coefficients in mask order")
{
  Rng rng(3);
  const ImageD image = test::random_image(rng, 128, 128);
  const BandMask mask = band_mask(128, 128, 0.5);
  const FeatureVector fv = extract_pbdct(image, mask);
  REQUIRE(fv.values.size() == 8192);
  CHECK(fv.descriptor_tag == DescriptorTag::PBDCT);
  const ImageD coeffs = dct2(image);
  for (std::size_t i = 0; i < mask.pool_size(); i += 101) {
    const auto [u, v] = mask.kept_indices[i];
    CHECK(fv.values(static_cast<Eigen::Index>(i)) == coeffs(u, v));
  }

  const FeatureVector flat = extract_pbdct(ImageD::Constant(128, 128, 0.5), mask);
  CHECK(flat.values(0) == doctest::Approx(64.0));
  CHECK(flat.values.tail(8191).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("a single changed pixel changes the full-band vector")
{
  Rng rng(4);
  ImageD a = test::random_image(rng, 16, 16);
  ImageD b = a;
  b(7, 3) += 0.01;
  const BandMask mask = band_mask(16, 16, 1.0);
  CHECK(extract_pbdct(a, mask).values != extract_pbdct(b, mask).values);
}

TEST_CASE("shape mismatch is a configuration error")
{
  CHECK_THROWS_AS(extract_pbdct(ImageD::Zero(64, 64), band_mask(128, 128, 0.5)), ConfigError);
}
