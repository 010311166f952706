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

// Deterministic synthetic IDX files for tests and for smoke runs on machines
// without the real datasets: each class is a bright block in its own image
// quadrant with positional jitter and background noise, so the subsets are
// learnable but not trivial.

#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "qcnn/dataset.hpp"
#include "qcnn/rng.hpp"

namespace qcnn::test {

inline void write_be32(std::ofstream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
      static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

struct SyntheticSpec {
  int per_class = 32;
  std::uint64_t seed = 123;
  std::vector<int> labels = {0, 1, 2, 3};
};

inline RawImage synthetic_image(Rng& rng, int label) {
  RawImage img;
  img.label = label;
  for (auto& p : img.pixels) {
    p = static_cast<std::uint8_t>(rng.next_below(24));
  }
  const int quadrant = label % 4;
  const int base_r = (quadrant / 2) * 14 + 2 + static_cast<int>(rng.next_below(3));
  const int base_c = (quadrant % 2) * 14 + 2 + static_cast<int>(rng.next_below(3));
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 9; ++c) {
      const int rr = base_r + r;
      const int cc = base_c + c;
      if (rr >= kRawSide || cc >= kRawSide) continue;
      img.pixels[rr * kRawSide + cc] =
          static_cast<std::uint8_t>(170 + rng.next_below(80));
    }
  }
  return img;
}

/// Writes <stem>-images-idx3-ubyte and <stem>-labels-idx1-ubyte; classes are
/// interleaved so truncation by per-class limits stays balanced.
inline std::pair<std::string, std::string> write_synthetic_idx(
    const std::string& stem, const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  std::vector<RawImage> records;
  for (int i = 0; i < spec.per_class; ++i) {
    for (int label : spec.labels) {
      records.push_back(synthetic_image(rng, label));
    }
  }

  const std::string images_path = stem + "-images-idx3-ubyte";
  const std::string labels_path = stem + "-labels-idx1-ubyte";
  {
    std::ofstream out(images_path, std::ios::binary);
    write_be32(out, 0x00000803);
    write_be32(out, static_cast<std::uint32_t>(records.size()));
    write_be32(out, kRawSide);
    write_be32(out, kRawSide);
    for (const RawImage& r : records) {
      out.write(reinterpret_cast<const char*>(r.pixels.data()), kRawPixels);
    }
  }
  {
    std::ofstream out(labels_path, std::ios::binary);
    write_be32(out, 0x00000801);
    write_be32(out, static_cast<std::uint32_t>(records.size()));
    for (const RawImage& r : records) {
      const char b = static_cast<char>(r.label);
      out.write(&b, 1);
    }
  }
  return {images_path, labels_path};
}

}  // namespace qcnn::test
