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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcnn/statevector.hpp"

namespace qcnn {

/// Reference into the shared model parameter table:
/// gate angle = coefficient * theta[param_index] + offset.
struct ParamRef {
  int param_index;
  double coefficient;
  double offset;

  friend bool operator==(const ParamRef&, const ParamRef&) = default;
};

/// Gate template: a fixed-angle gate, or a gate whose angle resolves through
/// a ParamRef when parameters are bound.
struct CircuitOp {
  GateOp gate;
  std::optional<ParamRef> param;
};

enum class Entangler { ParameterizedCry, Cnot };

struct ArchitectureConfig {
  int num_regular_layers = 8;
  Entangler entangler = Entangler::ParameterizedCry;
  bool share_across_sublayers = true;
  bool include_final_filter = true;
  bool include_output_cascade = true;

  friend bool operator==(const ArchitectureConfig&, const ArchitectureConfig&) = default;
};

/// Ordered gate sequence over 13 wires whose angles reference a shared
/// parameter table. Immutable after build; safely shareable across workers.
struct ParamCircuit {
  int num_qubits = 0;
  std::vector<CircuitOp> ops;
  int num_params = 0;
  std::vector<int> data_qubits;
  std::vector<int> ancilla_qubits;
  int virtual_qubit = -1;  // -1 when the circuit has no virtual wire
  std::vector<int> readout;
  /// (stage name, index of the stage's first op); stages partition ops.
  std::vector<std::pair<std::string, std::size_t>> stage_marks;
  std::uint64_t arch_digest = 0;

  /// Index of the first op that touches a readout ancilla; ops.size() when
  /// none does. Before this point the ancillas are exactly |0>.
  std::size_t first_ancilla_op() const;

  /// Throws ValidationError if structural invariants are violated.
  void validate() const;

  std::string digest_hex() const;
};

/// Wire roles, fixed project-wide: data qubits 0..7, virtual wire 8,
/// readout ancillas 9..12 (class order a0..a3).
inline constexpr int kDataQubits = 8;
inline constexpr int kVirtualWire = 8;
inline constexpr int kFirstAncilla = 9;
inline constexpr int kTotalWires = 13;

/// Full architecture: F4/F3/F2 preliminary layers (2 sublayers each),
/// conv+pooling, regular layers, pooling, final filter, Toffoli output
/// cascade writing a one-hot class code onto the 4 ancillas.
ParamCircuit build_qcnn_circuit(const ArchitectureConfig& config);

/// Ablation architecture: CNOT entanglers everywhere, nothing after the
/// regular layers; each ancilla is entangled to one surviving qubit by a
/// single CNOT and read out directly.
ParamCircuit build_reference_circuit(const ArchitectureConfig& config);

/// Resolves every template against theta, preserving op order.
std::vector<GateOp> bind_parameters(const ParamCircuit& circuit,
                                    std::span<const double> theta);

/// Rewrites the circuit over {RX, RY, RZ, CNOT, X} only: each controlled
/// rotation becomes its CNOT cascade with split ParamRefs (coefficients
/// +-1/2 for one control, the Gray-code +-1/4 pattern for two).
ParamCircuit lower(const ParamCircuit& circuit);

int parameter_count(const ParamCircuit& circuit);

/// Plain-text listing, one op per line, stable across runs for a fixed
/// config; the arch digest is the FNV-1a hash of this text.
std::string dump_circuit(const ParamCircuit& circuit);

}  // namespace qcnn
