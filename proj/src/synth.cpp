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

#include "texdesc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace texdesc::synth
{

namespace
{

constexpr Density kDensities[] = {Density::d, Density::e, Density::f, Density::g};

std::string patch_id(const char * prefix, std::size_t index)
{
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%s_%04zu.pgm", prefix, index);
  return buffer;
}

}  // namespace

ImageD smooth_background(Rng & rng, Eigen::Index side)
{
  ImageD image = ImageD::Constant(side, side, uniform(rng, 0.35, 0.5));
  const double gx = uniform(rng, -0.1, 0.1) / static_cast<double>(side);
  const double gy = uniform(rng, -0.1, 0.1) / static_cast<double>(side);
  struct Bump
  {
    double cx, cy, width, amplitude;
  };
  Bump bumps[3];
  for (auto & bump : bumps) {
    bump = {uniform(rng, 0.0, side), uniform(rng, 0.0, side), uniform(rng, 25.0, 50.0), uniform(rng, -0.12, 0.12)};
  }
  for (Eigen::Index r = 0; r < side; ++r) {
    for (Eigen::Index c = 0; c < side; ++c) {
      double v = gx * static_cast<double>(c) + gy * static_cast<double>(r);
      for (const auto & bump : bumps) {
        const double dx = static_cast<double>(c) - bump.cx;
        const double dy = static_cast<double>(r) - bump.cy;
        v += bump.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * bump.width * bump.width));
      }
      image(r, c) += v;
    }
  }
  return image;
}

ImageD grating(Rng & rng, double orientation, Eigen::Index side)
{
  ImageD image = smooth_background(rng, side);
  // Period and phase stay close to fixed values so the grating keeps a
  // consistent sign pattern in the frequency domain.
  const double period = uniform(rng, 7.8, 8.2);
  const double phase = uniform(rng, -0.25, 0.25);
  const double amplitude = uniform(rng, 0.12, 0.18);
  const double ux = std::cos(orientation);
  const double uy = std::sin(orientation);
  for (Eigen::Index r = 0; r < side; ++r) {
    for (Eigen::Index c = 0; c < side; ++c) {
      const double t = static_cast<double>(c) * ux + static_cast<double>(r) * uy;
      image(r, c) += amplitude * std::sin(2.0 * std::numbers::pi * t / period + phase);
    }
  }
  return image;
}

ImageD round_blob(Rng & rng, Eigen::Index side)
{
  ImageD image = smooth_background(rng, side);
  const double half = 0.5 * static_cast<double>(side);
  const double cx = half + uniform(rng, -8.0, 8.0);
  const double cy = half + uniform(rng, -8.0, 8.0);
  const double radius = uniform(rng, 18.0, 30.0);
  const double amplitude = uniform(rng, 0.2, 0.3);
  for (Eigen::Index r = 0; r < side; ++r) {
    for (Eigen::Index c = 0; c < side; ++c) {
      const double d = std::hypot(static_cast<double>(c) - cx, static_cast<double>(r) - cy);
      image(r, c) += amplitude / (1.0 + std::exp((d - radius) / 2.0));
    }
  }
  return image;
}

ImageD spiculated_star(Rng & rng, Eigen::Index side)
{
  ImageD image = smooth_background(rng, side);
  const double half = 0.5 * static_cast<double>(side);
  const double cx = half + uniform(rng, -8.0, 8.0);
  const double cy = half + uniform(rng, -8.0, 8.0);
  const double core = uniform(rng, 8.0, 14.0);
  const double amplitude = uniform(rng, 0.2, 0.3);
  const int spikes = 6 + static_cast<int>(uniform_index(rng, 7));
  std::vector<double> angles(static_cast<std::size_t>(spikes));
  std::vector<double> lengths(static_cast<std::size_t>(spikes));
  const double offset = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  for (int k = 0; k < spikes; ++k) {
    angles[static_cast<std::size_t>(k)] =
      offset + 2.0 * std::numbers::pi * k / spikes + uniform(rng, -0.15, 0.15);
    lengths[static_cast<std::size_t>(k)] = uniform(rng, 35.0, 55.0);
  }
  for (Eigen::Index r = 0; r < side; ++r) {
    for (Eigen::Index c = 0; c < side; ++c) {
      const double dx = static_cast<double>(c) - cx;
      const double dy = static_cast<double>(r) - cy;
      const double d = std::hypot(dx, dy);
      double v = 1.0 / (1.0 + std::exp((d - core) / 1.5));
      for (std::size_t k = 0; k < angles.size(); ++k) {
        // Distance from the spicule's ray, tapering in width along its length.
        const double along = dx * std::cos(angles[k]) + dy * std::sin(angles[k]);
        if (along < 0.0 || along > lengths[k]) {
          continue;
        }
        const double across = std::abs(-dx * std::sin(angles[k]) + dy * std::cos(angles[k]));
        const double width = 2.0 * (1.0 - along / lengths[k]) + 0.5;
        v = std::max(v, std::exp(-across * across / (2.0 * width * width)) * (1.0 - 0.5 * along / lengths[k]));
      }
      image(r, c) += amplitude * v;
    }
  }
  return image;
}

void add_noise(ImageD & image, Rng & rng, double sigma)
{
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    image.data()[i] = std::clamp(image.data()[i] + sigma * normal(rng), 0.0, 1.0);
  }
}

Dataset texture_suite(std::size_t per_class, std::uint64_t seed, double noise)
{
  Rng rng(mix_seed(seed, 0x7e57));
  Dataset ds;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool abnormal = i % 2 == 1;
    const bool diagonal = (i / 2) % 2 == 1;
    ImageD image = abnormal ? grating(rng, diagonal ? std::numbers::pi / 4.0 : 0.0) : smooth_background(rng);
    add_noise(image, rng, noise);
    const Label label = !abnormal ? Label::normal : (diagonal ? Label::malignant : Label::benign);
    ds.records.push_back({patch_id(abnormal ? "grating" : "smooth", i), ImagePatch(std::move(image)),
                          kDensities[(i / 2) % 4], label});
  }
  return ds;
}

Dataset shape_suite(std::size_t per_class, std::uint64_t seed, double noise)
{
  Rng rng(mix_seed(seed, 0x5ba9e));
  Dataset ds;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool star = i % 2 == 1;
    ImageD image = star ? spiculated_star(rng) : round_blob(rng);
    add_noise(image, rng, noise);
    ds.records.push_back({patch_id(star ? "star" : "blob", i), ImagePatch(std::move(image)),
                          kDensities[(i / 2) % 4], star ? Label::malignant : Label::benign});
  }
  return ds;
}

Dataset noise_label_suite(std::size_t count, std::uint64_t seed, double noise)
{
  Rng rng(mix_seed(seed, 0xa015e));
  std::vector<Label> labels(count, Label::normal);
  for (std::size_t i = count / 2; i < count; ++i) {
    labels[i] = (i - count / 2) % 2 == 0 ? Label::benign : Label::malignant;
  }
  shuffle(labels, rng);
  Dataset ds;
  for (std::size_t i = 0; i < count; ++i) {
    ImageD image;
    switch (uniform_index(rng, 3)) {
      case 0: image = smooth_background(rng); break;
      case 1: image = grating(rng, 0.0); break;
      default: image = grating(rng, std::numbers::pi / 4.0); break;
    }
    add_noise(image, rng, noise);
    ds.records.push_back({patch_id("noise", i), ImagePatch(std::move(image)), kDensities[i % 4], labels[i]});
  }
  return ds;
}

}  // namespace texdesc::synth
