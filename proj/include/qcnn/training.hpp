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
#include <string>
#include <vector>

#include "qcnn/circuit.hpp"
#include "qcnn/encoding.hpp"

namespace qcnn {

struct Hyperparams {
  double learning_rate = 0.00005;
  int epochs = 50;
  int batch_size = 32;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 1;

  void validate() const;
};

struct EpochMetrics {
  int epoch;  // 1-based
  double train_loss;
  double train_acc;
  double test_acc;
};

struct TrainState {
  std::vector<double> theta;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  std::int64_t step = 0;  // number of Adam updates applied
  std::vector<EpochMetrics> history;
};

using Logits = std::array<double, 4>;

/// Exact simulation of the bound circuit on the encoded image;
/// logits[i] = P(readout ancilla i = 1).
Logits forward(const ParamCircuit& circuit, std::span<const double> theta,
               const EncodedImage& img);

struct LossGrad {
  double loss;
  Logits dlogits;  // softmax(p) - onehot(label); always sums to 0
};

/// Softmax cross-entropy, overflow-safe via max subtraction.
LossGrad softmax_cross_entropy(const Logits& logits, int label);

/// Exact analytic gradient of sum_i dL_dlogits[i] * logits_i(theta) by the
/// two-term parameter shift rule, applied per gate occurrence:
/// grad[k] = sum_j coeff_j * sum_i dL[i] * (logits_i(+pi/2) - logits_i(-pi/2)) / 2
/// over occurrences j referencing parameter k, where the shift lands on the
/// resolved gate angle of occurrence j. Requires a lowered circuit.
std::vector<double> parameter_shift_gradient(const ParamCircuit& lowered,
                                             std::span<const double> theta,
                                             const EncodedImage& img,
                                             const Logits& dL_dlogits);

/// One Adam update with bias correction; increments step.
void adam_step(TrainState& state, std::span<const double> grad,
               const Hyperparams& h);

/// Epochs of shuffled mini-batches; the batch gradient is the mean of
/// per-sample parameter-shift gradients. Per-sample work runs on the OpenMP
/// worker pool; batch reduction is a fixed-order sequential sum, so the run
/// is bitwise reproducible for a given seed at any worker count.
TrainState train(const ParamCircuit& circuit,
                 const std::vector<EncodedImage>& train_set,
                 const std::vector<EncodedImage>& test_set,
                 const Hyperparams& h);

struct EvalResult {
  double accuracy = 0.0;
  std::array<std::array<int, 4>, 4> confusion{};  // [true][predicted]
};

/// Argmax prediction (ties to the lowest class index).
EvalResult evaluate(const ParamCircuit& circuit, std::span<const double> theta,
                    const std::vector<EncodedImage>& dataset);

/// Reusable gradient engine: binds a lowered circuit once and serves
/// logits/gradients for many samples. When the circuit has the qcnn wire
/// layout (ancillas untouched until a trailing readout stage), the engine
/// simulates the parameterized region on the 9 active wires and folds the
/// fixed readout stage into a precomputed linear map over control patterns;
/// this is exact and is verified against the plain path in tests. Safe for
/// concurrent use.
class GradEngine {
 public:
  explicit GradEngine(ParamCircuit lowered);

  const ParamCircuit& circuit() const { return lowered_; }
  bool fast_path() const { return fast_; }

  Logits logits(std::span<const double> theta, const EncodedImage& img) const;

  /// Gradient of sum_i dL[i] * logits_i; also reports the base logits.
  std::vector<double> gradient(std::span<const double> theta,
                               const EncodedImage& img, const Logits& dL,
                               Logits* base_logits = nullptr) const;

  struct SampleResult {
    Logits logits;
    double loss;
    std::vector<double> grad;
  };

  /// Loss, base logits and loss gradient from a single prefix pass.
  SampleResult loss_gradient(std::span<const double> theta,
                             const EncodedImage& img, int label) const;

 private:
  /// Replay-ready form of one lowered gate: kind collapsed to a kernel
  /// shape, bit masks precomputed for the replay register width.
  struct CompiledGate {
    enum class Kernel { RealPair, DiagPhase, XPair, Swap } kernel;
    std::uint64_t tbit, lo, hi, cmask, cval;
    int param = -1;  // -1: fixed angle
    double coeff = 0.0;
    double offset = 0.0;  // holds the fixed angle when param < 0
  };

  struct PrefixPass {
    std::vector<double> angles;                // resolved per compiled gate
    std::vector<std::vector<cplx>> snapshots;  // state before each occurrence
    Logits base_logits;
  };

  static void apply_compiled(cplx* amps, std::int64_t pairs,
                             const CompiledGate& gate, double angle);
  std::vector<double> resolve_angles(std::span<const double> theta) const;
  PrefixPass run_prefix(std::span<const double> theta,
                        const EncodedImage& img) const;
  std::vector<double> run_shifts(const PrefixPass& pass, const Logits& dL) const;
  Logits readout(std::span<const cplx> amps) const;

  ParamCircuit lowered_;
  std::vector<CompiledGate> compiled_;    // ops [0, replay end) at replay width
  std::vector<std::size_t> occurrences_;  // compiled indices carrying a param
  std::size_t split_ = 0;                 // first op touching an ancilla
  bool fast_ = false;
  int replay_width_ = 0;
  std::vector<int> pattern_wires_;        // wires the readout map reads
  std::array<std::vector<double>, 4> readout_weights_;  // W[i][pattern]
};

/// Serialized training state bound to the architecture that produced it.
struct CheckpointData {
  std::string model;        // "qcnn" or "baseline"
  std::string arch_digest;  // hex
  std::string config_json;  // resolved run configuration
  int num_params = 0;
  std::int64_t step = 0;
  std::vector<double> theta;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
};

void save_checkpoint(const std::string& path, const CheckpointData& ckpt);
CheckpointData load_checkpoint(const std::string& path);

/// One record per epoch, as CSV (for plotting) and JSON (for machines).
/// Doubles round-trip exactly in both.
void write_metrics_csv(const std::string& path,
                       const std::vector<EpochMetrics>& history);
void write_metrics_json(const std::string& path,
                        const std::vector<EpochMetrics>& history);

}  // namespace qcnn
