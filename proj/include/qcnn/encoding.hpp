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
#include <vector>

#include "qcnn/statevector.hpp"

namespace qcnn {

inline constexpr int kImagePixels = 256;  // 16x16, flattened row-major

/// A normalized 256-pixel image vector ready for amplitude encoding,
/// together with its remapped class label.
struct EncodedImage {
  std::array<double, kImagePixels> coeffs;  // unit L2 norm, nonnegative
  int label = 0;                            // 0..3
  int source_id = -1;                       // dataset index
};

/// pixels / ||pixels||_2. All-zero input is rejected: normalization is
/// undefined for it.
std::array<double, kImagePixels> normalize_vector(
    const std::array<double, kImagePixels>& pixels);

/// State over total_qubits wires whose data qubits 0..7 carry coeffs[m] on
/// |m> (qubit 0 = most significant bit of m); every other wire is |0>.
StateVector amplitude_encode(const EncodedImage& img, int total_qubits);

}  // namespace qcnn
