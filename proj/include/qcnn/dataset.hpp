// Copyright 2026 The qcnn-hybrid Authors.
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

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcnn/encoding.hpp"

namespace qcnn {

inline constexpr int kRawSide = 28;
inline constexpr int kRawPixels = kRawSide * kRawSide;
inline constexpr int kGridSide = 16;

struct RawImage {
  std::array<std::uint8_t, kRawPixels> pixels;  // row-major 28x28
  int label = 0;                                // 0..9
};

/// Ordered list of 4 distinct source labels; the position in the list is the
/// remapped class index.
struct ClassSubsetSpec {
  std::array<int, 4> classes;

  void validate() const;
};

/// Parses an IDX image/label file pair (big-endian magics 0x803 / 0x801,
/// 28x28 images, matching counts). Format errors carry the byte offset.
std::vector<RawImage> load_idx(const std::string& images_path,
                               const std::string& labels_path);

std::map<int, int> count_by_class(const std::vector<RawImage>& records);

/// 28x28 -> 16x16 box (area-average) resampling with exact fractional pixel
/// coverage at scale 28/16 = 1.75. Constants are preserved and total mass is
/// conserved: sum(out) * 1.75^2 == sum(in).
std::array<double, kImagePixels> rescale_16(const RawImage& img);

/// Per-axis box-filter weights for src -> dst resampling. Each output cell
/// lists (source index, coverage) pairs; coverages sum to src/dst and every
/// source index is within [0, src).
std::vector<std::vector<std::pair<int, double>>> box_weights(int src, int dst);

/// Filters to the subset's classes, remaps labels to list positions,
/// rescales, flattens row-major and L2-normalizes. File order is kept;
/// limit_per_class truncates each class to its first occurrences.
std::vector<EncodedImage> make_dataset(const std::vector<RawImage>& records,
                                       const ClassSubsetSpec& spec,
                                       std::optional<int> limit_per_class = {});

/// Raw 28x28 companion for the classical baseline: same class selection and
/// label remap, pixels scaled to [0, 1] by /255 (no L2 normalization).
struct RawSample {
  std::array<double, kRawPixels> pixels;
  int label = 0;  // 0..3
};

std::vector<RawSample> make_raw_subset(const std::vector<RawImage>& records,
                                       const ClassSubsetSpec& spec,
                                       std::optional<int> limit_per_class = {});

}  // namespace qcnn
