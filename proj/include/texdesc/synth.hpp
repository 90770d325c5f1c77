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

#ifndef TEXDESC__SYNTH_HPP_
#define TEXDESC__SYNTH_HPP_

#include <cstdint>

#include "texdesc/patchio.hpp"
#include "texdesc/random.hpp"

/// Seeded synthetic patches with known structure, for end-to-end checks
/// where real mammogram patches are unavailable.
namespace texdesc::synth
{

/// Low-frequency background in roughly [0.25, 0.75].
ImageD smooth_background(Rng & rng, Eigen::Index side = kPatchSide);

/// Background plus a sinusoidal grating along `orientation` (radians).
ImageD grating(Rng & rng, double orientation, Eigen::Index side = kPatchSide);

/// Background plus a bright disc with a soft rim.
ImageD round_blob(Rng & rng, Eigen::Index side = kPatchSide);

/// Background plus a bright core with thin radial spicules.
ImageD spiculated_star(Rng & rng, Eigen::Index side = kPatchSide);

/// Add N(0, sigma^2) noise and clamp to [0,1].
void add_noise(ImageD & image, Rng & rng, double sigma);

/// n normal patches (smooth background) and n abnormal patches carrying
/// gratings: half at 0 degrees (labelled benign), half at 45 degrees
/// (malignant). Densities cycle d, e, f, g.
Dataset texture_suite(std::size_t per_class, std::uint64_t seed, double noise = 0.05);

/// n benign round blobs and n malignant spiculated stars.
Dataset shape_suite(std::size_t per_class, std::uint64_t seed, double noise = 0.05);

/// `count` patches drawn from the texture generators with labels assigned
/// independently of content: half normal, a quarter benign, a quarter
/// malignant.
Dataset noise_label_suite(std::size_t count, std::uint64_t seed, double noise = 0.05);

}  // namespace texdesc::synth

#endif  // TEXDESC__SYNTH_HPP_
