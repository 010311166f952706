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

#include "qcnn/encoding.hpp"

#include <cmath>

#include "qcnn/errors.hpp"

namespace qcnn {

std::array<double, kImagePixels> normalize_vector(
    const std::array<double, kImagePixels>& pixels) {
  double norm_sq = 0.0;
  for (double p : pixels) {
    if (p < 0.0 || !std::isfinite(p)) {
      throw ValidationError("pixels must be finite and nonnegative");
    }
    norm_sq += p * p;
  }
  if (norm_sq == 0.0) {
    throw ValidationError("cannot normalize an all-zero image");
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  std::array<double, kImagePixels> out;
  for (int i = 0; i < kImagePixels; ++i) out[i] = pixels[i] * inv;
  return out;
}

StateVector amplitude_encode(const EncodedImage& img, int total_qubits) {
  if (total_qubits < 8 || total_qubits > kMaxQubits) {
    throw ValidationError("amplitude_encode needs 8..13 wires");
  }
  // Data qubits are the top 8 bits of the basis index, so coefficient m
  // lands at index m << (total_qubits - 8) with all other wires |0>.
  const int shift = total_qubits - 8;
  std::vector<cplx> amps(std::size_t{1} << total_qubits, cplx(0, 0));
  for (int m = 0; m < kImagePixels; ++m) {
    amps[static_cast<std::size_t>(m) << shift] = cplx(img.coeffs[m], 0.0);
  }
  return StateVector::from_amplitudes(std::move(amps));
}

}  // namespace qcnn
