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

#include "qcnn/dataset.hpp"

#include <algorithm>
#include <fstream>

#include "qcnn/errors.hpp"

namespace qcnn {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset,
                        const std::string& path) {
  if (offset + 4 > buf.size()) {
    throw FormatError(path + ": truncated at byte offset " +
                      std::to_string(offset));
  }
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

std::vector<int> select_indices(const std::vector<RawImage>& records,
                                const ClassSubsetSpec& spec,
                                std::optional<int> limit_per_class) {
  spec.validate();
  std::array<int, 4> taken = {0, 0, 0, 0};
  std::vector<int> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (int c = 0; c < 4; ++c) {
      if (records[i].label != spec.classes[c]) continue;
      if (limit_per_class && taken[c] >= *limit_per_class) break;
      taken[c]++;
      out.push_back(static_cast<int>(i));
      break;
    }
  }
  for (int c = 0; c < 4; ++c) {
    if (taken[c] == 0) {
      throw ValidationError("class " + std::to_string(spec.classes[c]) +
                            " absent from records");
    }
  }
  return out;
}

int remapped_label(const RawImage& rec, const ClassSubsetSpec& spec) {
  for (int c = 0; c < 4; ++c) {
    if (rec.label == spec.classes[c]) return c;
  }
  throw ValidationError("record label not in subset");
}

}  // namespace

void ClassSubsetSpec::validate() const {
  for (int i = 0; i < 4; ++i) {
    if (classes[i] < 0 || classes[i] > 9) {
      throw ValidationError("subset class must be in 0..9");
    }
    for (int j = i + 1; j < 4; ++j) {
      if (classes[i] == classes[j]) {
        throw ValidationError("subset classes must be distinct");
      }
    }
  }
}

std::vector<RawImage> load_idx(const std::string& images_path,
                               const std::string& labels_path) {
  const auto img_buf = read_file(images_path);
  const auto lbl_buf = read_file(labels_path);

  if (read_be32(img_buf, 0, images_path) != kImagesMagic) {
    throw FormatError(images_path + ": bad magic at byte offset 0");
  }
  const std::uint32_t count = read_be32(img_buf, 4, images_path);
  const std::uint32_t rows = read_be32(img_buf, 8, images_path);
  const std::uint32_t cols = read_be32(img_buf, 12, images_path);
  if (rows != kRawSide || cols != kRawSide) {
    throw FormatError(images_path + ": expected 28x28 images, got " +
                      std::to_string(rows) + "x" + std::to_string(cols) +
                      " at byte offset 8");
  }
  const std::size_t expected = 16 + std::size_t{count} * kRawPixels;
  if (img_buf.size() < expected) {
    throw FormatError(images_path + ": truncated at byte offset " +
                      std::to_string(img_buf.size()));
  }

  if (read_be32(lbl_buf, 0, labels_path) != kLabelsMagic) {
    throw FormatError(labels_path + ": bad magic at byte offset 0");
  }
  const std::uint32_t label_count = read_be32(lbl_buf, 4, labels_path);
  if (label_count != count) {
    throw FormatError(labels_path + ": label count " +
                      std::to_string(label_count) + " does not match image count " +
                      std::to_string(count) + " at byte offset 4");
  }
  if (lbl_buf.size() < 8 + std::size_t{count}) {
    throw FormatError(labels_path + ": truncated at byte offset " +
                      std::to_string(lbl_buf.size()));
  }

  std::vector<RawImage> records(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint8_t label = lbl_buf[8 + i];
    if (label > 9) {
      throw FormatError(labels_path + ": label " + std::to_string(label) +
                        " out of range at byte offset " + std::to_string(8 + i));
    }
    records[i].label = label;
    std::copy_n(img_buf.begin() + 16 + std::size_t{i} * kRawPixels, kRawPixels,
                records[i].pixels.begin());
  }
  return records;
}

std::map<int, int> count_by_class(const std::vector<RawImage>& records) {
  std::map<int, int> counts;
  for (const RawImage& r : records) counts[r.label]++;
  return counts;
}

std::vector<std::vector<std::pair<int, double>>> box_weights(int src, int dst) {
  const double scale = static_cast<double>(src) / dst;
  std::vector<std::vector<std::pair<int, double>>> weights(dst);
  for (int i = 0; i < dst; ++i) {
    const double begin = i * scale;
    const double end = begin + scale;
    for (int s = static_cast<int>(begin); s < src; ++s) {
      const double lo = std::max(begin, static_cast<double>(s));
      const double hi = std::min(end, static_cast<double>(s + 1));
      if (hi <= lo) break;
      weights[i].emplace_back(s, hi - lo);
    }
  }
  return weights;
}

std::array<double, kImagePixels> rescale_16(const RawImage& img) {
  static const auto weights = box_weights(kRawSide, kGridSide);
  const double area = (static_cast<double>(kRawSide) / kGridSide) *
                      (static_cast<double>(kRawSide) / kGridSide);
  std::array<double, kImagePixels> out;
  for (int r = 0; r < kGridSide; ++r) {
    for (int c = 0; c < kGridSide; ++c) {
      double acc = 0.0;
      for (const auto& [sr, wr] : weights[r]) {
        for (const auto& [sc, wc] : weights[c]) {
          acc += wr * wc * img.pixels[sr * kRawSide + sc];
        }
      }
      out[r * kGridSide + c] = acc / area;
    }
  }
  return out;
}

std::vector<EncodedImage> make_dataset(const std::vector<RawImage>& records,
                                       const ClassSubsetSpec& spec,
                                       std::optional<int> limit_per_class) {
  const std::vector<int> picked = select_indices(records, spec, limit_per_class);
  std::vector<EncodedImage> out(picked.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(picked.size()); ++i) {
    const RawImage& rec = records[picked[i]];
    out[i].coeffs = normalize_vector(rescale_16(rec));
    out[i].label = remapped_label(rec, spec);
    out[i].source_id = picked[i];
  }
  return out;
}

std::vector<RawSample> make_raw_subset(const std::vector<RawImage>& records,
                                       const ClassSubsetSpec& spec,
                                       std::optional<int> limit_per_class) {
  const std::vector<int> picked = select_indices(records, spec, limit_per_class);
  std::vector<RawSample> out(picked.size());
  for (std::size_t i = 0; i < picked.size(); ++i) {
    const RawImage& rec = records[picked[i]];
    for (int p = 0; p < kRawPixels; ++p) {
      out[i].pixels[p] = rec.pixels[p] / 255.0;
    }
    out[i].label = remapped_label(rec, spec);
  }
  return out;
}

}  // namespace qcnn
