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

#include "qcnn/decompose.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qcnn/errors.hpp"

namespace qcnn {

namespace {

GateOp rotation(Axis axis, int target, double angle) {
  switch (axis) {
    case Axis::X:
      return GateOp::rx(target, angle);
    case Axis::Y:
      return GateOp::ry(target, angle);
    case Axis::Z:
      return GateOp::rz(target, angle);
  }
  throw ValidationError("rotation: unreachable axis");
}

// Bitwise dot product parity of two pattern indices.
int dot_parity(unsigned a, unsigned b) {
  unsigned v = a & b;
  int parity = 0;
  while (v) {
    parity ^= 1;
    v &= v - 1;
  }
  return parity;
}

}  // namespace

std::vector<unsigned> gray_sequence(int num_controls) {
  if (num_controls == 1) return {0u, 1u};
  if (num_controls == 2) return {0u, 1u, 3u, 2u};
  throw ValidationError("gray_sequence supports 1 or 2 controls, got " +
                        std::to_string(num_controls));
}

CascadePlan angle_transform(const PatternAngles& pattern,
                            const std::vector<int>& control_qubits) {
  const int c = static_cast<int>(control_qubits.size());
  if (c != 1 && c != 2) {
    throw ValidationError("angle_transform supports 1 or 2 controls, got " +
                          std::to_string(c));
  }
  const std::size_t len = std::size_t{1} << c;
  if (pattern.theta.size() != len) {
    throw ValidationError("PatternAngles length must be 2^controls");
  }

  const std::vector<unsigned> gray = gray_sequence(c);
  CascadePlan plan;
  plan.alphas.resize(len);
  plan.cnot_controls.resize(len);

  const double scale = 1.0 / static_cast<double>(len);
  for (std::size_t j = 0; j < len; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      const double sign = dot_parity(gray[j], static_cast<unsigned>(k)) ? -1.0 : 1.0;
      acc += sign * pattern.theta[k];
    }
    plan.alphas[j] = scale * acc;
  }

  // CNOT j follows rotation j; its control is the qubit whose pattern bit
  // changes between Gray codes g_j and g_{j+1} (cyclically). Pattern bit i
  // (from the most significant) belongs to control_qubits[i].
  for (std::size_t j = 0; j < len; ++j) {
    const unsigned change = gray[j] ^ gray[(j + 1) % len];
    int bit = 0;
    while ((change >> bit) > 1u) ++bit;
    plan.cnot_controls[j] = control_qubits[c - 1 - bit];
  }
  return plan;
}

std::vector<GateOp> cascade_ops(Axis axis, const CascadePlan& plan, int target) {
  std::vector<GateOp> ops;
  ops.reserve(plan.alphas.size() * 2);
  for (std::size_t j = 0; j < plan.alphas.size(); ++j) {
    ops.push_back(rotation(axis, target, plan.alphas[j]));
    ops.push_back(GateOp::cnot(plan.cnot_controls[j], target));
  }
  return ops;
}

std::vector<GateOp> decompose_controlled_rotation(Axis axis, double theta,
                                                  int control, int target) {
  if (control == target) {
    throw ValidationError("decompose_controlled_rotation: control equals target");
  }

  const Axis inner = (axis == Axis::X) ? Axis::Y : axis;
  std::vector<GateOp> ops;
  if (axis == Axis::X) {
    ops.push_back(GateOp::rz(target, std::numbers::pi / 2));
  }
  ops.push_back(rotation(inner, target, theta / 2.0));
  ops.push_back(GateOp::cnot(control, target));
  ops.push_back(rotation(inner, target, -theta / 2.0));
  ops.push_back(GateOp::cnot(control, target));
  if (axis == Axis::X) {
    ops.push_back(GateOp::rz(target, -std::numbers::pi / 2));
  }
  return ops;
}

std::vector<GateOp> ancilla_flip_toffoli(int c1, int c2, int target,
                                         int polarity1, int polarity2) {
  if (c1 == c2 || c1 == target || c2 == target) {
    throw ValidationError("ancilla_flip_toffoli: qubit indices must be distinct");
  }
  if ((polarity1 != 0 && polarity1 != 1) || (polarity2 != 0 && polarity2 != 1)) {
    throw ValidationError("ancilla_flip_toffoli: polarity must be 0 or 1");
  }

  // Rotate by pi only on the (polarity-adjusted) pattern 11.
  PatternAngles pattern{{0.0, 0.0, 0.0, std::numbers::pi}};
  const CascadePlan plan = angle_transform(pattern, {c1, c2});

  std::vector<GateOp> ops;
  if (polarity1 == 0) ops.push_back(GateOp::x(c1));
  if (polarity2 == 0) ops.push_back(GateOp::x(c2));
  for (const GateOp& op : cascade_ops(Axis::Y, plan, target)) ops.push_back(op);
  if (polarity2 == 0) ops.push_back(GateOp::x(c2));
  if (polarity1 == 0) ops.push_back(GateOp::x(c1));
  return ops;
}

}  // namespace qcnn
