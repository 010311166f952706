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
#include <vector>

#include "qcnn/dataset.hpp"
#include "qcnn/training.hpp"

namespace qcnn {

/// Classical comparison network:
///   conv 3x3 stride 2 (same padding, 28->14) -> ReLU
///   conv 3x3 stride 1 (valid, 14->12)        -> ReLU
///   2x2 average pool (12->6), flatten (36)
///   dense 36->4 -> ReLU, dense 4->4 -> logits
/// 10 + 10 + 148 + 20 = 188 trainable parameters in one flat vector.
struct BaselineModel {
  static constexpr int kConv1Kernel = 0;    // 3x3 row-major
  static constexpr int kConv1Bias = 9;
  static constexpr int kConv2Kernel = 10;
  static constexpr int kConv2Bias = 19;
  static constexpr int kDense1W = 20;       // [out][in], 4x36 row-major
  static constexpr int kDense1B = 164;
  static constexpr int kDense2W = 168;      // [out][in], 4x4 row-major
  static constexpr int kDense2B = 184;
  static constexpr int kNumParams = 188;

  std::vector<double> params;
};

BaselineModel build_baseline(std::uint64_t seed);

/// Intermediate activations of one forward pass, kept for backprop and for
/// shape assertions.
struct BaselineTrace {
  std::array<double, 14 * 14> conv1_pre;
  std::array<double, 14 * 14> conv1_act;
  std::array<double, 12 * 12> conv2_pre;
  std::array<double, 12 * 12> conv2_act;
  std::array<double, 36> pooled;
  std::array<double, 4> dense1_pre;
  std::array<double, 4> dense1_act;
  Logits logits;
};

BaselineTrace baseline_forward_traced(const BaselineModel& model,
                                      std::span<const double> pixels28);

Logits baseline_forward(const BaselineModel& model,
                        std::span<const double> pixels28);

/// Gradient of sum_i dL[i] * logits_i with respect to the 188 parameters.
std::vector<double> baseline_backward(const BaselineModel& model,
                                      std::span<const double> pixels28,
                                      const BaselineTrace& trace,
                                      const Logits& dL);

struct BaselineTrainResult {
  BaselineModel model;
  TrainState state;  // theta mirrors model.params
};

/// Same loop, loss, optimizer, determinism contract and metrics layout as
/// the quantum trainer.
BaselineTrainResult baseline_train(const std::vector<RawSample>& train_set,
                                   const std::vector<RawSample>& test_set,
                                   const Hyperparams& h);

EvalResult baseline_evaluate(const BaselineModel& model,
                             const std::vector<RawSample>& dataset);

}  // namespace qcnn
