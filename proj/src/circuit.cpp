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

#include "qcnn/circuit.hpp"

#include <array>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "qcnn/decompose.hpp"
#include "qcnn/errors.hpp"

namespace qcnn {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Incremental circuit assembly: tracks stage boundaries and hands out
/// parameter indices so filter templates can share them.
class Builder {
 public:
  explicit Builder(const ArchitectureConfig& config) : config_(config) {
    circuit_.num_qubits = kTotalWires;
    for (int q = 0; q < kDataQubits; ++q) circuit_.data_qubits.push_back(q);
    circuit_.virtual_qubit = kVirtualWire;
    for (int a = 0; a < 4; ++a) circuit_.ancilla_qubits.push_back(kFirstAncilla + a);
    circuit_.readout = circuit_.ancilla_qubits;
  }

  void stage(const std::string& name) {
    circuit_.stage_marks.emplace_back(name, circuit_.ops.size());
  }

  int alloc_params(int count) {
    const int first = circuit_.num_params;
    circuit_.num_params += count;
    return first;
  }

  void fixed(GateOp gate) { circuit_.ops.push_back({std::move(gate), std::nullopt}); }

  void param_gate(GateOp gate, int param_index) {
    circuit_.ops.push_back({std::move(gate), ParamRef{param_index, 1.0, 0.0}});
  }

  /// RY(theta_i) on each filter qubit, then the ring entanglement
  /// q0->q1->...->q0. CRY entanglers consume the second half of the
  /// parameter block; CNOT entanglers consume none.
  void filter_ring(std::span<const int> ring, std::span<const int> rotated,
                   int first_param) {
    for (std::size_t i = 0; i < rotated.size(); ++i) {
      param_gate(GateOp::ry(rotated[i], 0.0), first_param + static_cast<int>(i));
    }
    const int phi0 = first_param + static_cast<int>(rotated.size());
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const int from = ring[i];
      const int to = ring[(i + 1) % ring.size()];
      if (config_.entangler == Entangler::ParameterizedCry) {
        param_gate(GateOp::cry(from, to, 0.0), phi0 + static_cast<int>(i));
      } else {
        fixed(GateOp::cnot(from, to));
      }
    }
  }

  int params_per_f4() const {
    return config_.entangler == Entangler::ParameterizedCry ? 8 : 4;
  }
  int params_per_f3() const {
    return config_.entangler == Entangler::ParameterizedCry ? 7 : 3;
  }

  /// F4 sublayers: filters on (0,1,2,3),(4,5,6,7), then shifted by 2 with
  /// wrap-around. Returns the number of parameters consumed.
  void f4_stage(const char* name) {
    const int per = params_per_f4();
    int params = alloc_params(per);
    stage(std::string(name) + ".s1");
    for (const auto& f : kF4Sublayer1) filter_ring(f, f, params);
    if (!config_.share_across_sublayers) params = alloc_params(per);
    stage(std::string(name) + ".s2");
    for (const auto& f : kF4Sublayer2) filter_ring(f, f, params);
  }

  /// F3 sublayers tile the 9-wire scan cycle (data 0..7 then the virtual
  /// wire); each filter rotates 3 qubits but entangles 4, the fourth being
  /// the next wire in scan order.
  void f3_stage() {
    const int per = params_per_f3();
    int params = alloc_params(per);
    stage("f3.s1");
    for (const auto& f : kF3Sublayer1) {
      filter_ring(std::span<const int>(f.data(), 4),
                  std::span<const int>(f.data(), 3), params);
    }
    if (!config_.share_across_sublayers) params = alloc_params(per);
    stage("f3.s2");
    for (const auto& f : kF3Sublayer2) {
      filter_ring(std::span<const int>(f.data(), 4),
                  std::span<const int>(f.data(), 3), params);
    }
  }

  /// F2 block (a,b),(c,d): individual rotations, then the CNOT ring
  /// a->b->c->d->a (the in-pair links a->b and c->d are its first half).
  void f2_block(const std::array<int, 4>& block, int first_param) {
    for (int i = 0; i < 4; ++i) {
      param_gate(GateOp::ry(block[i], 0.0), first_param + i);
    }
    fixed(GateOp::cnot(block[0], block[1]));
    fixed(GateOp::cnot(block[2], block[3]));
    fixed(GateOp::cnot(block[1], block[2]));
    fixed(GateOp::cnot(block[3], block[0]));
  }

  void f2_stage() {
    int params = alloc_params(4);
    stage("f2.s1");
    for (const auto& b : kF4Sublayer1) f2_block(b, params);
    if (!config_.share_across_sublayers) params = alloc_params(4);
    stage("f2.s2");
    for (const auto& b : kF4Sublayer2) f2_block(b, params);
  }

  /// Pooling pair: CRZ fires when the dropped qubit is |1>, CRX when it
  /// is |0>; afterwards the dropped qubit receives no further gates.
  void pool_pairs(const char* name,
                  std::span<const std::pair<int, int>> pairs) {
    const int params = alloc_params(2);
    stage(name);
    for (const auto& [dropped, kept] : pairs) {
      param_gate(GateOp::crz(dropped, kept, 0.0, 1), params);
      param_gate(GateOp::crx(dropped, kept, 0.0, 0), params + 1);
    }
  }

  /// Regular layer on the surviving qubits: one RY each (independent
  /// parameters per layer) and double entanglement, a CNOT ring followed by
  /// the reversed ring.
  void regular_layer(int index, std::span<const int> qubits) {
    const int params = alloc_params(static_cast<int>(qubits.size()));
    stage("regular." + std::to_string(index));
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      param_gate(GateOp::ry(qubits[i], 0.0), params + static_cast<int>(i));
    }
    const std::size_t n = qubits.size();
    for (std::size_t i = 0; i < n; ++i) {
      fixed(GateOp::cnot(qubits[i], qubits[(i + 1) % n]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      fixed(GateOp::cnot(qubits[(i + 1) % n], qubits[i]));
    }
  }

  void final_filter() {
    stage("final");
    const int params = alloc_params(2);
    param_gate(GateOp::ry(3, 0.0), params);
    param_gate(GateOp::ry(7, 0.0), params + 1);
    if (config_.entangler == Entangler::ParameterizedCry) {
      const int phis = alloc_params(2);
      param_gate(GateOp::cry(3, 7, 0.0), phis);
      param_gate(GateOp::cry(7, 3, 0.0), phis + 1);
    } else {
      fixed(GateOp::cnot(3, 7));
      fixed(GateOp::cnot(7, 3));
    }
  }

  /// Four polarity-controlled Toffolis mapping the class code on (3,7) onto
  /// the ancillas: ancilla i fires on code i. Native CCRY(pi); lower()
  /// expands it to the Gray cascade.
  void output_cascade() {
    stage("cascade");
    for (int code = 0; code < 4; ++code) {
      const int p1 = (code >> 1) & 1;
      const int p2 = code & 1;
      fixed(GateOp::ccry(3, 7, kFirstAncilla + code, kPi, p1, p2));
    }
  }

  void ancilla_entangle() {
    stage("ancilla_entangle");
    const std::array<int, 4> partners = {1, 3, 5, 7};
    for (int i = 0; i < 4; ++i) {
      fixed(GateOp::cnot(partners[i], kFirstAncilla + i));
    }
  }

  ParamCircuit finish() {
    circuit_.arch_digest = fnv1a64(dump_circuit(circuit_));
    circuit_.validate();
    return std::move(circuit_);
  }

  static constexpr std::array<std::array<int, 4>, 2> kF4Sublayer1 = {
      {{0, 1, 2, 3}, {4, 5, 6, 7}}};
  static constexpr std::array<std::array<int, 4>, 2> kF4Sublayer2 = {
      {{2, 3, 4, 5}, {6, 7, 0, 1}}};
  // Fourth entry is the ring-completion wire (next in scan order).
  static constexpr std::array<std::array<int, 4>, 3> kF3Sublayer1 = {
      {{0, 1, 2, 3}, {3, 4, 5, 6}, {6, 7, kVirtualWire, 0}}};
  static constexpr std::array<std::array<int, 4>, 3> kF3Sublayer2 = {
      {{1, 2, 3, 4}, {4, 5, 6, 7}, {7, kVirtualWire, 0, 1}}};

 private:
  ArchitectureConfig config_;
  ParamCircuit circuit_;
};

void append_lowered(std::vector<CircuitOp>& out, const CircuitOp& op) {
  const GateOp& g = op.gate;
  switch (g.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::X:
    case GateKind::CNOT:
      out.push_back(op);
      return;
    case GateKind::CRX:
    case GateKind::CRY:
    case GateKind::CRZ: {
      const ControlSpec& c = g.controls[0];
      const GateKind rot =
          g.kind == GateKind::CRZ ? GateKind::RZ : GateKind::RY;
      if (c.polarity == 0) out.push_back({GateOp::x(c.qubit), std::nullopt});
      if (g.kind == GateKind::CRX) {
        out.push_back({GateOp::rz(g.target, kPi / 2), std::nullopt});
      }
      for (int half = 0; half < 2; ++half) {
        const double sign = half == 0 ? 0.5 : -0.5;
        CircuitOp piece{{rot, g.target, {}, sign * g.angle}, std::nullopt};
        if (op.param) {
          piece.param = ParamRef{op.param->param_index,
                                 sign * op.param->coefficient,
                                 sign * op.param->offset};
          piece.gate.angle = 0.0;
        }
        out.push_back(std::move(piece));
        out.push_back({GateOp::cnot(c.qubit, g.target), std::nullopt});
      }
      if (g.kind == GateKind::CRX) {
        out.push_back({GateOp::rz(g.target, -kPi / 2), std::nullopt});
      }
      if (c.polarity == 0) out.push_back({GateOp::x(c.qubit), std::nullopt});
      return;
    }
    case GateKind::CCRY: {
      const ControlSpec& c1 = g.controls[0];
      const ControlSpec& c2 = g.controls[1];
      if (c1.polarity == 0) out.push_back({GateOp::x(c1.qubit), std::nullopt});
      if (c2.polarity == 0) out.push_back({GateOp::x(c2.qubit), std::nullopt});
      // Gray cascade for "rotate only on pattern 11": alphas alternate
      // +theta/4, -theta/4 and the CNOT controls follow c2, c1, c2, c1.
      PatternAngles pattern{{0.0, 0.0, 0.0, 1.0}};
      const CascadePlan plan = angle_transform(pattern, {c1.qubit, c2.qubit});
      for (std::size_t j = 0; j < plan.alphas.size(); ++j) {
        const double coeff = plan.alphas[j];  // +-1/4
        CircuitOp piece{{GateKind::RY, g.target, {}, coeff * g.angle},
                        std::nullopt};
        if (op.param) {
          piece.param = ParamRef{op.param->param_index,
                                 coeff * op.param->coefficient,
                                 coeff * op.param->offset};
          piece.gate.angle = 0.0;
        }
        out.push_back(std::move(piece));
        out.push_back({GateOp::cnot(plan.cnot_controls[j], g.target), std::nullopt});
      }
      if (c2.polarity == 0) out.push_back({GateOp::x(c2.qubit), std::nullopt});
      if (c1.polarity == 0) out.push_back({GateOp::x(c1.qubit), std::nullopt});
      return;
    }
  }
  throw ValidationError("lower: unsupported gate kind");
}

}  // namespace

std::size_t ParamCircuit::first_ancilla_op() const {
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const GateOp& g = ops[i].gate;
    for (int a : ancilla_qubits) {
      if (g.target == a) return i;
      for (const auto& c : g.controls) {
        if (c.qubit == a) return i;
      }
    }
  }
  return ops.size();
}

void ParamCircuit::validate() const {
  std::vector<int> refs(num_params, 0);
  for (const CircuitOp& op : ops) {
    if (op.gate.target < 0 || op.gate.target >= num_qubits) {
      throw ValidationError("circuit op target out of range");
    }
    for (const auto& c : op.gate.controls) {
      if (c.qubit < 0 || c.qubit >= num_qubits) {
        throw ValidationError("circuit op control out of range");
      }
    }
    if (op.param) {
      if (op.param->param_index < 0 || op.param->param_index >= num_params) {
        throw ValidationError("param_index out of range");
      }
      if (op.param->coefficient == 0.0) {
        throw ValidationError("ParamRef coefficient must be nonzero");
      }
      refs[op.param->param_index]++;
    }
  }
  for (int k = 0; k < num_params; ++k) {
    if (refs[k] == 0) {
      throw ValidationError("parameter " + std::to_string(k) +
                            " referenced by no op");
    }
  }
}

std::string ParamCircuit::digest_hex() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(arch_digest));
  return buf;
}

ParamCircuit build_qcnn_circuit(const ArchitectureConfig& config) {
  if (config.num_regular_layers < 1) {
    throw ConfigError("num_regular_layers must be >= 1");
  }
  Builder b(config);
  b.f4_stage("f4");
  b.f3_stage();
  b.f2_stage();
  b.f4_stage("conv");

  const std::array<std::pair<int, int>, 4> pool1 = {
      {{0, 1}, {2, 3}, {4, 5}, {6, 7}}};
  b.pool_pairs("pool1", pool1);

  const std::array<int, 4> surviving = {1, 3, 5, 7};
  for (int l = 1; l <= config.num_regular_layers; ++l) {
    b.regular_layer(l, surviving);
  }

  const std::array<std::pair<int, int>, 2> pool2 = {{{1, 3}, {5, 7}}};
  b.pool_pairs("pool2", pool2);

  if (config.include_final_filter) b.final_filter();
  if (config.include_output_cascade) b.output_cascade();
  return b.finish();
}

ParamCircuit build_reference_circuit(const ArchitectureConfig& config) {
  if (config.num_regular_layers < 1) {
    throw ConfigError("num_regular_layers must be >= 1");
  }
  ArchitectureConfig ablated = config;
  ablated.entangler = Entangler::Cnot;

  Builder b(ablated);
  b.f4_stage("f4");
  b.f3_stage();
  b.f2_stage();
  b.f4_stage("conv");

  const std::array<std::pair<int, int>, 4> pool1 = {
      {{0, 1}, {2, 3}, {4, 5}, {6, 7}}};
  b.pool_pairs("pool1", pool1);

  const std::array<int, 4> surviving = {1, 3, 5, 7};
  for (int l = 1; l <= config.num_regular_layers; ++l) {
    b.regular_layer(l, surviving);
  }

  b.ancilla_entangle();
  return b.finish();
}

std::vector<GateOp> bind_parameters(const ParamCircuit& circuit,
                                    std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != circuit.num_params) {
    throw ValidationError("theta length " + std::to_string(theta.size()) +
                          " does not match num_params " +
                          std::to_string(circuit.num_params));
  }
  std::vector<GateOp> out;
  out.reserve(circuit.ops.size());
  for (const CircuitOp& op : circuit.ops) {
    GateOp g = op.gate;
    if (op.param) {
      g.angle = op.param->coefficient * theta[op.param->param_index] +
                op.param->offset;
    }
    out.push_back(std::move(g));
  }
  return out;
}

ParamCircuit lower(const ParamCircuit& circuit) {
  ParamCircuit out;
  out.num_qubits = circuit.num_qubits;
  out.num_params = circuit.num_params;
  out.data_qubits = circuit.data_qubits;
  out.ancilla_qubits = circuit.ancilla_qubits;
  out.virtual_qubit = circuit.virtual_qubit;
  out.readout = circuit.readout;

  std::size_t next_mark = 0;
  for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
    while (next_mark < circuit.stage_marks.size() &&
           circuit.stage_marks[next_mark].second == i) {
      out.stage_marks.emplace_back(circuit.stage_marks[next_mark].first,
                                   out.ops.size());
      ++next_mark;
    }
    append_lowered(out.ops, circuit.ops[i]);
  }
  while (next_mark < circuit.stage_marks.size()) {
    out.stage_marks.emplace_back(circuit.stage_marks[next_mark].first,
                                 out.ops.size());
    ++next_mark;
  }

  out.arch_digest = fnv1a64(dump_circuit(out));
  out.validate();
  return out;
}

int parameter_count(const ParamCircuit& circuit) { return circuit.num_params; }

std::string dump_circuit(const ParamCircuit& circuit) {
  std::ostringstream os;
  os << "qcnn-circuit v1\n";
  os << "qubits: " << circuit.num_qubits << "\n";
  os << "data:";
  for (int q : circuit.data_qubits) os << " " << q;
  os << "\nvirtual: " << circuit.virtual_qubit << "\nancillas:";
  for (int q : circuit.ancilla_qubits) os << " " << q;
  os << "\nreadout:";
  for (int q : circuit.readout) os << " " << q;
  os << "\nparams: " << circuit.num_params << "\n";

  std::size_t next_mark = 0;
  for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
    while (next_mark < circuit.stage_marks.size() &&
           circuit.stage_marks[next_mark].second == i) {
      os << "stage " << circuit.stage_marks[next_mark].first << "\n";
      ++next_mark;
    }
    const CircuitOp& op = circuit.ops[i];
    os << to_string(op.gate.kind) << " t=" << op.gate.target;
    if (!op.gate.controls.empty()) {
      os << " c=";
      for (std::size_t c = 0; c < op.gate.controls.size(); ++c) {
        if (c > 0) os << ",";
        os << op.gate.controls[c].qubit << ":" << op.gate.controls[c].polarity;
      }
    }
    if (op.param) {
      os << " param=" << op.param->param_index
         << " coeff=" << fmt_double(op.param->coefficient)
         << " offset=" << fmt_double(op.param->offset);
    } else if (has_angle(op.gate.kind)) {
      os << " angle=" << fmt_double(op.gate.angle);
    }
    os << "\n";
  }
  while (next_mark < circuit.stage_marks.size()) {
    os << "stage " << circuit.stage_marks[next_mark].first << "\n";
    ++next_mark;
  }
  return os.str();
}

}  // namespace qcnn
