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

#include "qcnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "json.hpp"
#include "qcnn/errors.hpp"
#include "qcnn/rng.hpp"

namespace qcnn {

namespace {

constexpr double kShift = std::numbers::pi / 2;

bool is_lowered_kind(GateKind k) {
  return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ ||
         k == GateKind::CNOT || k == GateKind::X;
}

void require_lowered(const ParamCircuit& circuit) {
  for (const CircuitOp& op : circuit.ops) {
    if (!is_lowered_kind(op.gate.kind)) {
      throw ValidationError(
          std::string("parameter_shift_gradient requires a lowered circuit; found ") +
          to_string(op.gate.kind));
    }
  }
}

}  // namespace

void Hyperparams::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0) {
    throw ConfigError("adam betas must be in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be > 0");
}

Logits forward(const ParamCircuit& circuit, std::span<const double> theta,
               const EncodedImage& img) {
  const std::vector<GateOp> bound = bind_parameters(circuit, theta);
  StateVector st = amplitude_encode(img, circuit.num_qubits);
  apply_ops(st, bound);
  Logits out;
  for (int i = 0; i < 4; ++i) out[i] = probability_one(st, circuit.readout[i]);
  return out;
}

LossGrad softmax_cross_entropy(const Logits& logits, int label) {
  if (label < 0 || label > 3) throw ValidationError("label must be in 0..3");
  for (double v : logits) {
    if (!std::isfinite(v)) throw ValidationError("logits must be finite");
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  Logits e;
  double z = 0.0;
  for (int i = 0; i < 4; ++i) {
    e[i] = std::exp(logits[i] - m);
    z += e[i];
  }
  LossGrad out;
  out.loss = -(logits[label] - m - std::log(z));
  for (int i = 0; i < 4; ++i) {
    out.dlogits[i] = e[i] / z - (i == label ? 1.0 : 0.0);
  }
  return out;
}

/// Serial pair kernels over a raw amplitude buffer; the replay hot path runs
/// at 9 qubits where per-gate OpenMP or per-call validation would dominate.
/// Arithmetic is identical to apply_gate's, order included.
void GradEngine::apply_compiled(cplx* a, std::int64_t pairs,
                                const CompiledGate& g, double angle) {
  using Kernel = CompiledGate::Kernel;
  switch (g.kernel) {
    case Kernel::RealPair: {
      const double c = std::cos(angle / 2.0);
      const double s = std::sin(angle / 2.0);
      for (std::int64_t k = 0; k < pairs; ++k) {
        const std::uint64_t u = static_cast<std::uint64_t>(k);
        const std::uint64_t i0 = ((u & g.hi) << 1) | (u & g.lo);
        if ((i0 & g.cmask) != g.cval) continue;
        const std::uint64_t i1 = i0 | g.tbit;
        const double x0 = a[i0].real(), y0 = a[i0].imag();
        const double x1 = a[i1].real(), y1 = a[i1].imag();
        a[i0] = cplx(c * x0 - s * x1, c * y0 - s * y1);
        a[i1] = cplx(s * x0 + c * x1, s * y0 + c * y1);
      }
      return;
    }
    case Kernel::DiagPhase: {
      const double c = std::cos(angle / 2.0);
      const double s = std::sin(angle / 2.0);
      for (std::int64_t k = 0; k < pairs; ++k) {
        const std::uint64_t u = static_cast<std::uint64_t>(k);
        const std::uint64_t i0 = ((u & g.hi) << 1) | (u & g.lo);
        if ((i0 & g.cmask) != g.cval) continue;
        const std::uint64_t i1 = i0 | g.tbit;
        const double x0 = a[i0].real(), y0 = a[i0].imag();
        const double x1 = a[i1].real(), y1 = a[i1].imag();
        a[i0] = cplx(c * x0 + s * y0, c * y0 - s * x0);
        a[i1] = cplx(c * x1 - s * y1, c * y1 + s * x1);
      }
      return;
    }
    case Kernel::XPair: {
      const double c = std::cos(angle / 2.0);
      const double s = std::sin(angle / 2.0);
      for (std::int64_t k = 0; k < pairs; ++k) {
        const std::uint64_t u = static_cast<std::uint64_t>(k);
        const std::uint64_t i0 = ((u & g.hi) << 1) | (u & g.lo);
        if ((i0 & g.cmask) != g.cval) continue;
        const std::uint64_t i1 = i0 | g.tbit;
        const double x0 = a[i0].real(), y0 = a[i0].imag();
        const double x1 = a[i1].real(), y1 = a[i1].imag();
        a[i0] = cplx(c * x0 + s * y1, c * y0 - s * x1);
        a[i1] = cplx(s * y0 + c * x1, -s * x0 + c * y1);
      }
      return;
    }
    case Kernel::Swap: {
      for (std::int64_t k = 0; k < pairs; ++k) {
        const std::uint64_t u = static_cast<std::uint64_t>(k);
        const std::uint64_t i0 = ((u & g.hi) << 1) | (u & g.lo);
        if ((i0 & g.cmask) != g.cval) continue;
        std::swap(a[i0], a[i0 | g.tbit]);
      }
      return;
    }
  }
}

GradEngine::GradEngine(ParamCircuit lowered) : lowered_(std::move(lowered)) {
  require_lowered(lowered_);
  if (lowered_.readout.size() != 4) {
    throw ValidationError("GradEngine requires 4 readout wires");
  }
  split_ = lowered_.first_ancilla_op();

  // The fast path applies when the circuit uses the standard wire layout and
  // the ancilla-touching suffix is a fixed readout stage: unparameterized,
  // acting only on ancilla targets plus a small set of non-ancilla pattern
  // wires it reads (CNOT controls) or flips (bare X). Then every suffix
  // image of |pattern> x |0000> is a product state, distinct patterns stay
  // orthogonal, and P(ancilla_i = 1) is a fixed linear map W applied to the
  // pattern probabilities of the pre-suffix state.
  fast_ = lowered_.num_qubits == kTotalWires &&
          lowered_.ancilla_qubits == std::vector<int>{9, 10, 11, 12} &&
          lowered_.readout == std::vector<int>{9, 10, 11, 12};
  for (std::size_t i = 0; fast_ && i < split_; ++i) {
    // Parameterized ops must fit the 9 active wires.
    const GateOp& g = lowered_.ops[i].gate;
    if (g.target > kVirtualWire) fast_ = false;
    for (const auto& c : g.controls) {
      if (c.qubit > kVirtualWire) fast_ = false;
    }
  }
  if (fast_) {
    const auto is_ancilla = [&](int q) { return q >= kFirstAncilla; };
    std::set<int> pattern_set;
    for (std::size_t i = split_; i < lowered_.ops.size() && fast_; ++i) {
      const GateOp& g = lowered_.ops[i].gate;
      if (lowered_.ops[i].param) {
        fast_ = false;
        break;
      }
      if (is_ancilla(g.target)) {
        for (const auto& c : g.controls) {
          if (is_ancilla(c.qubit)) fast_ = false;
          pattern_set.insert(c.qubit);
        }
      } else if (g.kind == GateKind::X && g.controls.empty()) {
        pattern_set.insert(g.target);
      } else {
        fast_ = false;
      }
    }
    if (pattern_set.size() > 4) fast_ = false;
    if (fast_) {
      pattern_wires_.assign(pattern_set.begin(), pattern_set.end());

      // W[i][pattern] by simulating the real suffix once per pattern.
      const std::size_t num_patterns = std::size_t{1} << pattern_wires_.size();
      for (auto& w : readout_weights_) w.assign(num_patterns, 0.0);
      for (std::size_t pat = 0; pat < num_patterns; ++pat) {
        std::vector<cplx> amps(std::size_t{1} << kTotalWires, cplx(0, 0));
        std::size_t index = 0;
        for (std::size_t w = 0; w < pattern_wires_.size(); ++w) {
          if ((pat >> (pattern_wires_.size() - 1 - w)) & 1u) {
            index |= qubit_bit(kTotalWires, pattern_wires_[w]);
          }
        }
        amps[index] = cplx(1, 0);
        StateVector st = StateVector::from_amplitudes(std::move(amps));
        for (std::size_t i = split_; i < lowered_.ops.size(); ++i) {
          apply_gate(st, lowered_.ops[i].gate);
        }
        for (int a = 0; a < 4; ++a) {
          readout_weights_[a][pat] = probability_one(st, lowered_.readout[a]);
        }
      }
    }
  }

  // Compile the replayed region once: masks, kernel shapes and param links.
  replay_width_ = fast_ ? kVirtualWire + 1 : lowered_.num_qubits;
  const std::size_t replay_end = fast_ ? split_ : lowered_.ops.size();
  compiled_.reserve(replay_end);
  for (std::size_t i = 0; i < replay_end; ++i) {
    const CircuitOp& op = lowered_.ops[i];
    CompiledGate cg;
    switch (op.gate.kind) {
      case GateKind::RY:
        cg.kernel = CompiledGate::Kernel::RealPair;
        break;
      case GateKind::RZ:
        cg.kernel = CompiledGate::Kernel::DiagPhase;
        break;
      case GateKind::RX:
        cg.kernel = CompiledGate::Kernel::XPair;
        break;
      default:
        cg.kernel = CompiledGate::Kernel::Swap;
        break;
    }
    cg.tbit = qubit_bit(replay_width_, op.gate.target);
    cg.lo = cg.tbit - 1;
    cg.hi = ~cg.lo;
    cg.cmask = 0;
    cg.cval = 0;
    for (const auto& c : op.gate.controls) {
      const std::uint64_t b = qubit_bit(replay_width_, c.qubit);
      cg.cmask |= b;
      if (c.polarity == 1) cg.cval |= b;
    }
    if (op.param) {
      cg.param = op.param->param_index;
      cg.coeff = op.param->coefficient;
      cg.offset = op.param->offset;
      occurrences_.push_back(i);
    } else {
      cg.offset = op.gate.angle;
    }
    compiled_.push_back(cg);
  }
}

Logits GradEngine::readout(std::span<const cplx> amps) const {
  Logits out;
  if (fast_) {
    // Joint pattern probabilities, fixed ascending reduction.
    std::array<double, 16> probs{};
    const int n = replay_width_;
    for (std::size_t i = 0; i < amps.size(); ++i) {
      std::size_t pattern = 0;
      for (std::size_t w = 0; w < pattern_wires_.size(); ++w) {
        pattern = (pattern << 1) | ((i >> (n - 1 - pattern_wires_[w])) & 1u);
      }
      probs[pattern] += std::norm(amps[i]);
    }
    for (int a = 0; a < 4; ++a) {
      double acc = 0.0;
      for (std::size_t p = 0; p < readout_weights_[a].size(); ++p) {
        acc += readout_weights_[a][p] * probs[p];
      }
      out[a] = acc;
    }
    return out;
  }
  for (int a = 0; a < 4; ++a) {
    const std::uint64_t qbit = qubit_bit(replay_width_, lowered_.readout[a]);
    double p = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
      if (i & qbit) p += std::norm(amps[i]);
    }
    out[a] = p;
  }
  return out;
}

std::vector<double> GradEngine::resolve_angles(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != lowered_.num_params) {
    throw ValidationError("theta length does not match num_params");
  }
  std::vector<double> angles(compiled_.size());
  for (std::size_t i = 0; i < compiled_.size(); ++i) {
    const CompiledGate& cg = compiled_[i];
    angles[i] = cg.param >= 0 ? cg.coeff * theta[cg.param] + cg.offset : cg.offset;
  }
  return angles;
}

Logits GradEngine::logits(std::span<const double> theta,
                          const EncodedImage& img) const {
  const std::vector<double> angles = resolve_angles(theta);
  StateVector st = amplitude_encode(img, replay_width_);
  cplx* a = st.amps().data();
  const std::int64_t pairs = static_cast<std::int64_t>(st.size() >> 1);
  for (std::size_t i = 0; i < compiled_.size(); ++i) {
    apply_compiled(a, pairs, compiled_[i], angles[i]);
  }
  return readout(st.amps());
}

GradEngine::PrefixPass GradEngine::run_prefix(std::span<const double> theta,
                                              const EncodedImage& img) const {
  PrefixPass pass;
  pass.angles = resolve_angles(theta);

  pass.snapshots.resize(occurrences_.size());
  StateVector st = amplitude_encode(img, replay_width_);
  cplx* a = st.amps().data();
  const std::int64_t pairs = static_cast<std::int64_t>(st.size() >> 1);
  std::size_t next_occ = 0;
  for (std::size_t i = 0; i < compiled_.size(); ++i) {
    if (next_occ < occurrences_.size() && occurrences_[next_occ] == i) {
      pass.snapshots[next_occ].assign(st.amps().begin(), st.amps().end());
      ++next_occ;
    }
    apply_compiled(a, pairs, compiled_[i], pass.angles[i]);
  }
  pass.base_logits = readout(st.amps());
  return pass;
}

std::vector<double> GradEngine::run_shifts(const PrefixPass& pass,
                                           const Logits& dL) const {
  // Two shifted replays per occurrence, independent across occurrences.
  std::vector<double> occ_grad(occurrences_.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t j = 0; j < static_cast<std::int64_t>(occurrences_.size()); ++j) {
    const std::size_t op_index = occurrences_[j];
    const std::int64_t pairs =
        static_cast<std::int64_t>(pass.snapshots[j].size() >> 1);
    Logits shifted[2];
    std::vector<cplx> work;
    for (int s = 0; s < 2; ++s) {
      work = pass.snapshots[j];
      const double delta = s == 0 ? kShift : -kShift;
      apply_compiled(work.data(), pairs, compiled_[op_index],
                     pass.angles[op_index] + delta);
      for (std::size_t i = op_index + 1; i < compiled_.size(); ++i) {
        apply_compiled(work.data(), pairs, compiled_[i], pass.angles[i]);
      }
      shifted[s] = readout(work);
    }
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      acc += dL[i] * (shifted[0][i] - shifted[1][i]) / 2.0;
    }
    occ_grad[j] = acc;
  }

  // Fixed-order reduction over occurrences keeps results bitwise identical
  // for any worker count.
  std::vector<double> grad(lowered_.num_params, 0.0);
  for (std::size_t j = 0; j < occurrences_.size(); ++j) {
    const CompiledGate& cg = compiled_[occurrences_[j]];
    grad[cg.param] += cg.coeff * occ_grad[j];
  }
  return grad;
}

std::vector<double> GradEngine::gradient(std::span<const double> theta,
                                         const EncodedImage& img, const Logits& dL,
                                         Logits* base_logits) const {
  const PrefixPass pass = run_prefix(theta, img);
  if (base_logits) *base_logits = pass.base_logits;
  return run_shifts(pass, dL);
}

GradEngine::SampleResult GradEngine::loss_gradient(std::span<const double> theta,
                                                   const EncodedImage& img,
                                                   int label) const {
  const PrefixPass pass = run_prefix(theta, img);
  const LossGrad lg = softmax_cross_entropy(pass.base_logits, label);
  SampleResult out;
  out.logits = pass.base_logits;
  out.loss = lg.loss;
  out.grad = run_shifts(pass, lg.dlogits);
  return out;
}

std::vector<double> parameter_shift_gradient(const ParamCircuit& lowered,
                                             std::span<const double> theta,
                                             const EncodedImage& img,
                                             const Logits& dL_dlogits) {
  GradEngine engine(lowered);
  return engine.gradient(theta, img, dL_dlogits);
}

void adam_step(TrainState& state, std::span<const double> grad,
               const Hyperparams& h) {
  const std::size_t n = state.theta.size();
  if (grad.size() != n || state.adam_m.size() != n || state.adam_v.size() != n) {
    throw ValidationError("adam_step: shape mismatch");
  }
  state.step += 1;
  const double b1 = h.adam_beta1;
  const double b2 = h.adam_beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < n; ++k) {
    state.adam_m[k] = b1 * state.adam_m[k] + (1.0 - b1) * grad[k];
    state.adam_v[k] = b2 * state.adam_v[k] + (1.0 - b2) * grad[k] * grad[k];
    const double m_hat = state.adam_m[k] / bias1;
    const double v_hat = state.adam_v[k] / bias2;
    state.theta[k] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.adam_eps);
  }
}

TrainState train(const ParamCircuit& circuit,
                 const std::vector<EncodedImage>& train_set,
                 const std::vector<EncodedImage>& test_set, const Hyperparams& h) {
  h.validate();
  if (train_set.empty() || test_set.empty()) {
    throw ValidationError("train: datasets must be nonempty");
  }
  std::array<bool, 4> seen = {false, false, false, false};
  for (const EncodedImage& img : train_set) {
    if (img.label < 0 || img.label > 3) throw ValidationError("label out of range");
    seen[img.label] = true;
  }
  for (bool s : seen) {
    if (!s) throw ValidationError("train: all 4 classes must be present");
  }

  Rng rng(h.seed);
  TrainState state;
  state.theta.resize(circuit.num_params);
  for (double& t : state.theta) t = rng.next_uniform(-0.1, 0.1);
  state.adam_m.assign(circuit.num_params, 0.0);
  state.adam_v.assign(circuit.num_params, 0.0);

  const GradEngine engine(lower(circuit));

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

#pragma omp parallel for schedule(dynamic, 1)
      for (std::int64_t s = 0; s < static_cast<std::int64_t>(count); ++s) {
        const EncodedImage& img = train_set[order[start + s]];
        auto sample = engine.loss_gradient(state.theta, img, img.label);
        grads[s] = std::move(sample.grad);
        losses[s] = sample.loss;
        const int pred = static_cast<int>(
            std::max_element(sample.logits.begin(), sample.logits.end()) -
            sample.logits.begin());
        hits[s] = pred == img.label ? 1 : 0;
      }

      std::vector<double> batch_grad(circuit.num_params, 0.0);
      for (std::size_t s = 0; s < count; ++s) {
        for (int k = 0; k < circuit.num_params; ++k) batch_grad[k] += grads[s][k];
        loss_sum += losses[s];
        correct += hits[s];
      }
      for (double& g : batch_grad) g /= static_cast<double>(count);
      adam_step(state, batch_grad, h);
    }

    const EvalResult test = evaluate(circuit, state.theta, test_set);
    state.history.push_back({epoch, loss_sum / static_cast<double>(order.size()),
                             static_cast<double>(correct) / order.size(),
                             test.accuracy});
  }
  return state;
}

EvalResult evaluate(const ParamCircuit& circuit, std::span<const double> theta,
                    const std::vector<EncodedImage>& dataset) {
  if (dataset.empty()) throw ValidationError("evaluate: dataset must be nonempty");
  std::vector<int> preds(dataset.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(dataset.size()); ++i) {
    const Logits logits = forward(circuit, theta, dataset[i]);
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

void save_checkpoint(const std::string& path, const CheckpointData& ckpt) {
  nlohmann::json j;
  j["model"] = ckpt.model;
  j["arch_digest"] = ckpt.arch_digest;
  j["config"] = nlohmann::json::parse(ckpt.config_json.empty() ? "{}" : ckpt.config_json);
  j["num_params"] = ckpt.num_params;
  j["step"] = ckpt.step;
  j["theta"] = ckpt.theta;
  j["adam_m"] = ckpt.adam_m;
  j["adam_v"] = ckpt.adam_v;
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write checkpoint " + path);
  out << j.dump(2) << "\n";
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open checkpoint " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint " + path + ": " + e.what());
  }
  CheckpointData ckpt;
  try {
    ckpt.model = j.at("model").get<std::string>();
    ckpt.arch_digest = j.at("arch_digest").get<std::string>();
    ckpt.config_json = j.at("config").dump();
    ckpt.num_params = j.at("num_params").get<int>();
    ckpt.step = j.at("step").get<std::int64_t>();
    ckpt.theta = j.at("theta").get<std::vector<double>>();
    ckpt.adam_m = j.at("adam_m").get<std::vector<double>>();
    ckpt.adam_v = j.at("adam_v").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint " + path + ": " + e.what());
  }
  return ckpt;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<EpochMetrics>& history) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write metrics " + path);
  out << "epoch,train_loss,train_acc,test_acc\n";
  char buf[128];
  for (const EpochMetrics& m : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", m.epoch,
                  m.train_loss, m.train_acc, m.test_acc);
    out << buf;
  }
}

void write_metrics_json(const std::string& path,
                        const std::vector<EpochMetrics>& history) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const EpochMetrics& m : history) {
    epochs.push_back({{"epoch", m.epoch},
                      {"train_loss", m.train_loss},
                      {"train_acc", m.train_acc},
                      {"test_acc", m.test_acc}});
  }
  nlohmann::json j;
  j["epochs"] = epochs;
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write metrics " + path);
  out << j.dump(2) << "\n";
}

}  // namespace qcnn
