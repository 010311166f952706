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

#include <cmath>

#include "doctest.h"
#include "qcnn/baseline.hpp"
#include "qcnn/errors.hpp"
#include "qcnn/rng.hpp"

using namespace qcnn;

namespace {

std::array<double, kRawPixels> random_input(Rng& rng) {
  std::array<double, kRawPixels> px;
  for (double& p : px) p = rng.next_unit();
  return px;
}

std::vector<RawSample> synthetic_raw(int per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<RawSample> out;
  for (int i = 0; i < per_class; ++i) {
    for (int label = 0; label < 4; ++label) {
      RawSample s;
      for (double& p : s.pixels) p = 0.05 * rng.next_unit();
      const int base_r = (label / 2) * 14 + 2 + static_cast<int>(rng.next_below(3));
      const int base_c = (label % 2) * 14 + 2 + static_cast<int>(rng.next_below(3));
      for (int r = 0; r < 9; ++r) {
        for (int c = 0; c < 9; ++c) {
          if (base_r + r < kRawSide && base_c + c < kRawSide) {
            s.pixels[(base_r + r) * kRawSide + base_c + c] =
                0.7 + 0.3 * rng.next_unit();
          }
        }
      }
      s.label = label;
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("baseline") {

TEST_CASE("parameter count and layer budget match the layer table") {
  CHECK(BaselineModel::kNumParams == 188);
  CHECK(BaselineModel::kConv1Bias - BaselineModel::kConv1Kernel + 1 == 10);
  CHECK(BaselineModel::kConv2Bias - BaselineModel::kConv2Kernel + 1 == 10);
  CHECK(BaselineModel::kDense2W - BaselineModel::kDense1W == 148);
  CHECK(BaselineModel::kNumParams - BaselineModel::kDense2W == 20);
  const BaselineModel model = build_baseline(5);
  CHECK(model.params.size() == 188);
}

TEST_CASE("layer shapes: 28 -> 14 -> 12 -> 6 -> 36 -> 4 -> 4") {
  Rng rng(6);
  const BaselineModel model = build_baseline(6);
  const auto input = random_input(rng);
  const BaselineTrace t = baseline_forward_traced(model, input);
  CHECK(t.conv1_pre.size() == 14 * 14);
  CHECK(t.conv2_pre.size() == 12 * 12);
  CHECK(t.pooled.size() == 36);
  CHECK(t.logits.size() == 4);
}

TEST_CASE("zero input with zero biases gives zero logits") {
  BaselineModel model = build_baseline(7);
  model.params[BaselineModel::kConv1Bias] = 0.0;
  model.params[BaselineModel::kConv2Bias] = 0.0;
  for (int o = 0; o < 4; ++o) {
    model.params[BaselineModel::kDense1B + o] = 0.0;
    model.params[BaselineModel::kDense2B + o] = 0.0;
  }
  std::array<double, kRawPixels> zeros{};
  const Logits logits = baseline_forward(model, zeros);
  for (double l : logits) CHECK(l == 0.0);
}

TEST_CASE("conv pre-activations are linear in the input") {
  Rng rng(8);
  BaselineModel model = build_baseline(8);
  model.params[BaselineModel::kConv1Bias] = 0.0;
  const auto input = random_input(rng);
  auto doubled = input;
  for (double& p : doubled) p *= 2.0;
  const BaselineTrace a = baseline_forward_traced(model, input);
  const BaselineTrace b = baseline_forward_traced(model, doubled);
  for (int i = 0; i < 14 * 14; ++i) {
    CHECK(b.conv1_pre[i] == doctest::Approx(2.0 * a.conv1_pre[i]).epsilon(1e-12));
  }
}

TEST_CASE("backprop matches finite differences within 1e-5") {
  Rng rng(9);
  const BaselineModel model = build_baseline(10);
  const auto input = random_input(rng);
  const int label = 2;

  const BaselineTrace trace = baseline_forward_traced(model, input);
  const LossGrad lg = softmax_cross_entropy(trace.logits, label);
  const std::vector<double> grad =
      baseline_backward(model, input, trace, lg.dlogits);

  constexpr double kStep = 1e-6;
  for (int k = 0; k < BaselineModel::kNumParams; ++k) {
    BaselineModel probe = model;
    probe.params[k] = model.params[k] + kStep;
    const double lp = softmax_cross_entropy(baseline_forward(probe, input), label).loss;
    probe.params[k] = model.params[k] - kStep;
    const double lm = softmax_cross_entropy(baseline_forward(probe, input), label).loss;
    const double fd = (lp - lm) / (2 * kStep);
    CHECK(std::abs(fd - grad[k]) < 1e-5);
  }
}

TEST_CASE("training is deterministic and learns the synthetic quadrants") {
  const auto train_set = synthetic_raw(12, 31);  // 48 images
  const auto test_set = synthetic_raw(6, 32);    // 24 images
  Hyperparams h;
  h.learning_rate = 0.01;
  h.epochs = 25;
  h.batch_size = 16;
  h.seed = 77;

  const BaselineTrainResult a = baseline_train(train_set, test_set, h);
  CHECK(a.state.history.size() == 25);

  SUBCASE("same seed, same history") {
    const BaselineTrainResult b = baseline_train(train_set, test_set, h);
    for (std::size_t e = 0; e < a.state.history.size(); ++e) {
      CHECK(a.state.history[e].train_loss == b.state.history[e].train_loss);
      CHECK(a.state.history[e].test_acc == b.state.history[e].test_acc);
    }
  }

  SUBCASE("accuracy is materially above chance") {
    CHECK(a.state.history.back().test_acc > 0.5);
    CHECK(a.state.history.back().train_loss < a.state.history.front().train_loss);
  }

  SUBCASE("shape validation") {
    CHECK_THROWS_AS(baseline_forward(a.model, std::vector<double>(10, 0.0)),
                    ValidationError);
  }
}

}  // TEST_SUITE
