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

#include "qcnn/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "qcnn/errors.hpp"
#include "qcnn/rng.hpp"

namespace qcnn {

namespace {

// conv1 halves 28 -> 14 with stride 2 and TensorFlow-style "same" padding:
// pad one row/column at the bottom/right only.
constexpr int kIn = 28;
constexpr int kC1 = 14;
constexpr int kC2 = 12;
constexpr int kPool = 6;

double relu(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

BaselineModel build_baseline(std::uint64_t seed) {
  // Fan-in-scaled uniform weights with zero biases. A flat [-0.1, 0.1] init
  // kills this net for roughly a third of seeds: every conv1 ReLU lands
  // dead, the output goes input-independent, and the conv gradients are
  // exactly zero forever.
  Rng rng(seed);
  BaselineModel model;
  model.params.assign(BaselineModel::kNumParams, 0.0);
  const auto fill = [&](int begin, int count, double fan_in) {
    const double r = std::sqrt(6.0 / fan_in);
    for (int k = 0; k < count; ++k) {
      model.params[begin + k] = rng.next_uniform(-r, r);
    }
  };
  fill(BaselineModel::kConv1Kernel, 9, 9.0);
  fill(BaselineModel::kConv2Kernel, 9, 9.0);
  fill(BaselineModel::kDense1W, 144, 36.0);
  fill(BaselineModel::kDense2W, 16, 4.0);
  return model;
}

BaselineTrace baseline_forward_traced(const BaselineModel& model,
                                      std::span<const double> pixels28) {
  if (pixels28.size() != kRawPixels) {
    throw ValidationError("baseline_forward expects a 28x28 input");
  }
  if (model.params.size() != BaselineModel::kNumParams) {
    throw ValidationError("baseline model must carry 188 parameters");
  }
  const double* p = model.params.data();
  BaselineTrace t;

  for (int i = 0; i < kC1; ++i) {
    for (int j = 0; j < kC1; ++j) {
      double acc = p[BaselineModel::kConv1Bias];
      for (int di = 0; di < 3; ++di) {
        for (int dj = 0; dj < 3; ++dj) {
          const int r = 2 * i + di;
          const int c = 2 * j + dj;
          if (r >= kIn || c >= kIn) continue;
          acc += p[BaselineModel::kConv1Kernel + di * 3 + dj] * pixels28[r * kIn + c];
        }
      }
      t.conv1_pre[i * kC1 + j] = acc;
      t.conv1_act[i * kC1 + j] = relu(acc);
    }
  }

  for (int i = 0; i < kC2; ++i) {
    for (int j = 0; j < kC2; ++j) {
      double acc = p[BaselineModel::kConv2Bias];
      for (int di = 0; di < 3; ++di) {
        for (int dj = 0; dj < 3; ++dj) {
          acc += p[BaselineModel::kConv2Kernel + di * 3 + dj] *
                 t.conv1_act[(i + di) * kC1 + (j + dj)];
        }
      }
      t.conv2_pre[i * kC2 + j] = acc;
      t.conv2_act[i * kC2 + j] = relu(acc);
    }
  }

  for (int i = 0; i < kPool; ++i) {
    for (int j = 0; j < kPool; ++j) {
      t.pooled[i * kPool + j] =
          0.25 * (t.conv2_act[(2 * i) * kC2 + 2 * j] +
                  t.conv2_act[(2 * i) * kC2 + 2 * j + 1] +
                  t.conv2_act[(2 * i + 1) * kC2 + 2 * j] +
                  t.conv2_act[(2 * i + 1) * kC2 + 2 * j + 1]);
    }
  }

  for (int o = 0; o < 4; ++o) {
    double acc = p[BaselineModel::kDense1B + o];
    for (int k = 0; k < 36; ++k) {
      acc += p[BaselineModel::kDense1W + o * 36 + k] * t.pooled[k];
    }
    t.dense1_pre[o] = acc;
    t.dense1_act[o] = relu(acc);
  }

  for (int o = 0; o < 4; ++o) {
    double acc = p[BaselineModel::kDense2B + o];
    for (int k = 0; k < 4; ++k) {
      acc += p[BaselineModel::kDense2W + o * 4 + k] * t.dense1_act[k];
    }
    t.logits[o] = acc;
  }
  return t;
}

Logits baseline_forward(const BaselineModel& model,
                        std::span<const double> pixels28) {
  return baseline_forward_traced(model, pixels28).logits;
}

std::vector<double> baseline_backward(const BaselineModel& model,
                                      std::span<const double> pixels28,
                                      const BaselineTrace& t, const Logits& dL) {
  const double* p = model.params.data();
  std::vector<double> grad(BaselineModel::kNumParams, 0.0);

  std::array<double, 4> d_dense1_act{};
  for (int o = 0; o < 4; ++o) {
    grad[BaselineModel::kDense2B + o] += dL[o];
    for (int k = 0; k < 4; ++k) {
      grad[BaselineModel::kDense2W + o * 4 + k] += dL[o] * t.dense1_act[k];
      d_dense1_act[k] += dL[o] * p[BaselineModel::kDense2W + o * 4 + k];
    }
  }

  std::array<double, 36> d_pooled{};
  for (int o = 0; o < 4; ++o) {
    const double d_pre = t.dense1_pre[o] > 0.0 ? d_dense1_act[o] : 0.0;
    grad[BaselineModel::kDense1B + o] += d_pre;
    for (int k = 0; k < 36; ++k) {
      grad[BaselineModel::kDense1W + o * 36 + k] += d_pre * t.pooled[k];
      d_pooled[k] += d_pre * p[BaselineModel::kDense1W + o * 36 + k];
    }
  }

  std::array<double, kC2 * kC2> d_conv2_act{};
  for (int i = 0; i < kPool; ++i) {
    for (int j = 0; j < kPool; ++j) {
      const double share = 0.25 * d_pooled[i * kPool + j];
      d_conv2_act[(2 * i) * kC2 + 2 * j] += share;
      d_conv2_act[(2 * i) * kC2 + 2 * j + 1] += share;
      d_conv2_act[(2 * i + 1) * kC2 + 2 * j] += share;
      d_conv2_act[(2 * i + 1) * kC2 + 2 * j + 1] += share;
    }
  }

  std::array<double, kC1 * kC1> d_conv1_act{};
  for (int i = 0; i < kC2; ++i) {
    for (int j = 0; j < kC2; ++j) {
      const double d_pre =
          t.conv2_pre[i * kC2 + j] > 0.0 ? d_conv2_act[i * kC2 + j] : 0.0;
      if (d_pre == 0.0) continue;
      grad[BaselineModel::kConv2Bias] += d_pre;
      for (int di = 0; di < 3; ++di) {
        for (int dj = 0; dj < 3; ++dj) {
          grad[BaselineModel::kConv2Kernel + di * 3 + dj] +=
              d_pre * t.conv1_act[(i + di) * kC1 + (j + dj)];
          d_conv1_act[(i + di) * kC1 + (j + dj)] +=
              d_pre * p[BaselineModel::kConv2Kernel + di * 3 + dj];
        }
      }
    }
  }

  for (int i = 0; i < kC1; ++i) {
    for (int j = 0; j < kC1; ++j) {
      const double d_pre =
          t.conv1_pre[i * kC1 + j] > 0.0 ? d_conv1_act[i * kC1 + j] : 0.0;
      if (d_pre == 0.0) continue;
      grad[BaselineModel::kConv1Bias] += d_pre;
      for (int di = 0; di < 3; ++di) {
        for (int dj = 0; dj < 3; ++dj) {
          const int r = 2 * i + di;
          const int c = 2 * j + dj;
          if (r >= kIn || c >= kIn) continue;
          grad[BaselineModel::kConv1Kernel + di * 3 + dj] +=
              d_pre * pixels28[r * kIn + c];
        }
      }
    }
  }
  return grad;
}

BaselineTrainResult baseline_train(const std::vector<RawSample>& train_set,
                                   const std::vector<RawSample>& test_set,
                                   const Hyperparams& h) {
  h.validate();
  if (train_set.empty() || test_set.empty()) {
    throw ValidationError("baseline_train: datasets must be nonempty");
  }

  // One seed stream, init first and shuffles after, as in the quantum
  // trainer; build_baseline consumes the 178 weight draws.
  Rng rng(h.seed);
  BaselineTrainResult result;
  result.model = build_baseline(h.seed);
  for (int k = 0; k < 178; ++k) rng.next_u64();
  TrainState& state = result.state;
  state.theta = result.model.params;
  state.adam_m.assign(BaselineModel::kNumParams, 0.0);
  state.adam_v.assign(BaselineModel::kNumParams, 0.0);

  std::vector<int> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 1; epoch <= h.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    int correct = 0;
    for (std::size_t start = 0; start < order.size(); start += h.batch_size) {
      const std::size_t count = std::min<std::size_t>(h.batch_size, order.size() - start);
      std::vector<std::vector<double>> grads(count);
      std::vector<double> losses(count);
      std::vector<int> hits(count);

#pragma omp parallel for schedule(static)
      for (std::int64_t s = 0; s < static_cast<std::int64_t>(count); ++s) {
        const RawSample& sample = train_set[order[start + s]];
        const BaselineTrace trace =
            baseline_forward_traced(result.model, sample.pixels);
        const LossGrad lg = softmax_cross_entropy(trace.logits, sample.label);
        grads[s] = baseline_backward(result.model, sample.pixels, trace, lg.dlogits);
        losses[s] = lg.loss;
        const int pred = static_cast<int>(
            std::max_element(trace.logits.begin(), trace.logits.end()) -
            trace.logits.begin());
        hits[s] = pred == sample.label ? 1 : 0;
      }

      std::vector<double> batch_grad(BaselineModel::kNumParams, 0.0);
      for (std::size_t s = 0; s < count; ++s) {
        for (int k = 0; k < BaselineModel::kNumParams; ++k) {
          batch_grad[k] += grads[s][k];
        }
        loss_sum += losses[s];
        correct += hits[s];
      }
      for (double& g : batch_grad) g /= static_cast<double>(count);
      adam_step(state, batch_grad, h);
      result.model.params = state.theta;
    }

    const EvalResult test = baseline_evaluate(result.model, test_set);
    state.history.push_back({epoch, loss_sum / static_cast<double>(order.size()),
                             static_cast<double>(correct) / order.size(),
                             test.accuracy});
  }
  return result;
}

EvalResult baseline_evaluate(const BaselineModel& model,
                             const std::vector<RawSample>& dataset) {
  if (dataset.empty()) throw ValidationError("baseline_evaluate: empty dataset");
  std::vector<int> preds(dataset.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(dataset.size()); ++i) {
    const Logits logits = baseline_forward(model, dataset[i].pixels);
    preds[i] = static_cast<int>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
  }
  EvalResult out;
  int correct = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int label = dataset[i].label;
    if (label < 0 || label > 3) throw ValidationError("label out of range");
    out.confusion[label][preds[i]]++;
    if (preds[i] == label) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
  return out;
}

}  // namespace qcnn
