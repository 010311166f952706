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

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace qcnn {

using cplx = std::complex<double>;

/// Hard cap on register width: 8 data qubits + 4 ancillas + 1 virtual wire.
inline constexpr int kMaxQubits = 13;

enum class GateKind { RX, RY, RZ, X, CNOT, CRX, CRY, CRZ, CCRY };

const char* to_string(GateKind kind);

/// True for kinds that carry a rotation angle.
bool has_angle(GateKind kind);

/// Number of control wires the kind requires (0, 1 or 2).
int control_arity(GateKind kind);

struct ControlSpec {
  int qubit;
  int polarity;  // 1: active on |1>, 0: active on |0>

  friend bool operator==(const ControlSpec&, const ControlSpec&) = default;
};

/// One primitive gate instance. Rotation convention, fixed project-wide:
/// R_A(theta) = exp(-i * theta * A / 2) for A in {X, Y, Z}.
struct GateOp {
  GateKind kind;
  int target;
  std::vector<ControlSpec> controls;
  double angle = 0.0;

  static GateOp rx(int target, double angle) { return {GateKind::RX, target, {}, angle}; }
  static GateOp ry(int target, double angle) { return {GateKind::RY, target, {}, angle}; }
  static GateOp rz(int target, double angle) { return {GateKind::RZ, target, {}, angle}; }
  static GateOp x(int target) { return {GateKind::X, target, {}, 0.0}; }
  static GateOp cnot(int control, int target) {
    return {GateKind::CNOT, target, {{control, 1}}, 0.0};
  }
  static GateOp cry(int control, int target, double angle, int polarity = 1) {
    return {GateKind::CRY, target, {{control, polarity}}, angle};
  }
  static GateOp crz(int control, int target, double angle, int polarity = 1) {
    return {GateKind::CRZ, target, {{control, polarity}}, angle};
  }
  static GateOp crx(int control, int target, double angle, int polarity = 1) {
    return {GateKind::CRX, target, {{control, polarity}}, angle};
  }
  static GateOp ccry(int c1, int c2, int target, double angle, int polarity1 = 1,
                     int polarity2 = 1) {
    return {GateKind::CCRY, target, {{c1, polarity1}, {c2, polarity2}}, angle};
  }

  friend bool operator==(const GateOp&, const GateOp&) = default;
};

/// Bit position of a qubit within a basis index. Index convention, fixed
/// project-wide: qubit 0 is the most significant bit, so basis index
/// m = sum_i b_i * 2^(n-1-i).
constexpr std::uint64_t qubit_bit(int num_qubits, int qubit) {
  return std::uint64_t{1} << (num_qubits - 1 - qubit);
}

/// Dense complex amplitude array over n qubits; the simulator's single
/// mutable object. Confined to one worker at a time; distinct instances may
/// be processed concurrently.
class StateVector {
 public:
  /// |0...0> on num_qubits wires.
  explicit StateVector(int num_qubits);

  /// State with the given amplitudes. Length must be a power of two
  /// (at most 2^13) and the L2 norm must be within 1e-9 of 1.
  static StateVector from_amplitudes(std::vector<cplx> amps);

  int num_qubits() const { return num_qubits_; }
  std::size_t size() const { return amps_.size(); }
  std::span<const cplx> amps() const { return amps_; }
  std::span<cplx> amps() { return amps_; }

  double norm_sq() const;

 private:
  StateVector() = default;

  int num_qubits_ = 0;
  std::vector<cplx> amps_;
};

/// Multiplies the state by the gate's unitary in place. Controlled gates act
/// on the target subspace only where every control qubit matches its declared
/// polarity. Strided pair kernels, OpenMP-parallel above a size threshold;
/// results are bitwise identical for any thread count (disjoint writes).
void apply_gate(StateVector& state, const GateOp& op);

/// Pair count above which gate kernels fork an OpenMP team. Defaults well
/// above this project's register sizes (fork cost exceeds 13-qubit gate
/// work on small machines); lowered by tests and benchmarks to drive the
/// parallel path.
void set_parallel_pair_threshold(std::int64_t pairs);

void apply_ops(StateVector& state, std::span<const GateOp> ops);

/// Marginal P(qubit = 1); exact expectation, no shot sampling. The reduction
/// is a fixed sequential ascending-index sum so results are bitwise
/// reproducible.
double probability_one(const StateVector& state, int qubit);

/// Joint marginal P(qubit_a = bit_a and qubit_b = bit_b); same fixed
/// sequential reduction order as probability_one.
double probability_pattern(const StateVector& state, int qubit_a, int bit_a,
                           int qubit_b, int bit_b);

using CMatrix = std::vector<std::vector<cplx>>;

/// Full unitary of a gate sequence, built by applying the sequence to each
/// basis state (column j = ops applied to |j>). Oracle-scale only: n <= 6.
CMatrix unitary_of(std::span<const GateOp> ops, int num_qubits);

namespace ref {

/// Serial reference kernel kept for testing: a textbook out-of-place loop
/// over every basis index with an explicit control check, no stride tricks
/// and no per-kind specialization. The production kernels are verified
/// against this path, and tools/bench_kernels compares their throughput.
void apply_gate(StateVector& state, const GateOp& op);

double probability_one(const StateVector& state, int qubit);

}  // namespace ref

}  // namespace qcnn
