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

#include <vector>

#include "qcnn/statevector.hpp"

namespace qcnn {

enum class Axis { X, Y, Z };

/// Per-control-pattern rotation angles for a uniformly controlled rotation.
/// theta[p] is the angle applied when the control register reads pattern p,
/// with controls[0] the most significant pattern bit. Length is exactly 2^c.
struct PatternAngles {
  std::vector<double> theta;
};

/// Cascade form of a uniformly controlled rotation: alternating target
/// rotations R(alphas[j]) and CNOTs whose controls follow the Gray-code
/// bit-change sequence. With all alphas zero the plan is the identity.
struct CascadePlan {
  std::vector<double> alphas;
  std::vector<int> cnot_controls;
};

/// Gray-code order used project-wide for 2 controls: 00, 01, 11, 10.
std::vector<unsigned> gray_sequence(int num_controls);

/// alphas = M * theta with M_jk = 2^-c * (-1)^(g_j . b_k), g_j the j-th
/// Gray-code value and b_k the binary pattern index (bitwise dot product).
/// Supports 1 or 2 controls.
CascadePlan angle_transform(const PatternAngles& pattern,
                            const std::vector<int>& control_qubits);

/// Gate sequence realizing a CascadePlan around the given rotation axis.
std::vector<GateOp> cascade_ops(Axis axis, const CascadePlan& plan, int target);

/// Single-controlled rotation lowered to plain rotations and CNOTs:
/// [R(theta/2), CNOT, R(-theta/2), CNOT] for axes Y and Z. Axis X wraps the
/// same pattern in fixed RZ(+-pi/2) basis changes on the target, because
/// CNOT conjugation flips Y and Z rotations but commutes with X rotations.
/// The result equals the ideal controlled rotation up to global phase.
std::vector<GateOp> decompose_controlled_rotation(Axis axis, double theta,
                                                  int control, int target);

/// Gray-code cascade realizing CC-RY(pi) on the target, wrapped in X gates on
/// polarity-0 controls. Acting on any state whose target is |0>, the result
/// equals the ideal (polarity-adjusted) Toffoli's action. The |1> -> -|0>
/// branch of RY(pi) never activates here: the readout ancillas always start
/// in |0>.
std::vector<GateOp> ancilla_flip_toffoli(int c1, int c2, int target,
                                         int polarity1, int polarity2);

}  // namespace qcnn
