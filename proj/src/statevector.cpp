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

#include "qcnn/statevector.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>

#include "qcnn/errors.hpp"

namespace qcnn {

namespace detail {

// Gates on fewer pairs than this run serially. The fork-join cost of one
// OpenMP region exceeds the work of a whole 13-qubit gate on small core
// counts, so within this project's register sizes parallelism lives at the
// per-sample and per-occurrence level and the gate kernels go parallel only
// beyond it. Tests lower the threshold to exercise the parallel path.
std::atomic<std::int64_t> parallel_pair_threshold{std::int64_t{1} << 14};

}  // namespace detail

void set_parallel_pair_threshold(std::int64_t pairs) {
  detail::parallel_pair_threshold.store(pairs);
}

namespace {

// Explicit serial/parallel dispatch: an `omp parallel for if(...)` still
// sets up a team of one when the clause is false, which costs more than a
// whole gate on a small register.
template <typename Body>
inline void for_each_pair(std::int64_t pairs, Body&& body) {
  if (pairs >= detail::parallel_pair_threshold.load(std::memory_order_relaxed)) {
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < pairs; ++k) body(k);
  } else {
    for (std::int64_t k = 0; k < pairs; ++k) body(k);
  }
}

struct Mat2 {
  cplx u00, u01, u10, u11;
};

GateKind base_kind(GateKind kind) {
  switch (kind) {
    case GateKind::CRX:
      return GateKind::RX;
    case GateKind::CRY:
    case GateKind::CCRY:
      return GateKind::RY;
    case GateKind::CRZ:
      return GateKind::RZ;
    case GateKind::CNOT:
      return GateKind::X;
    default:
      return kind;
  }
}

Mat2 gate_matrix(GateKind kind, double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  switch (base_kind(kind)) {
    case GateKind::RX:
      return {cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0)};
    case GateKind::RY:
      return {cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)};
    case GateKind::RZ:
      return {cplx(c, -s), cplx(0, 0), cplx(0, 0), cplx(c, s)};
    case GateKind::X:
      return {cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)};
    default:
      throw ValidationError("gate_matrix: unreachable kind");
  }
}

void validate_op(int num_qubits, const GateOp& op) {
  if (op.target < 0 || op.target >= num_qubits) {
    throw ValidationError("gate target " + std::to_string(op.target) +
                          " out of range for " + std::to_string(num_qubits) +
                          " qubits");
  }
  const int arity = control_arity(op.kind);
  if (static_cast<int>(op.controls.size()) != arity) {
    throw ValidationError(std::string("gate ") + to_string(op.kind) +
                          " expects " + std::to_string(arity) + " controls, got " +
                          std::to_string(op.controls.size()));
  }
  for (std::size_t i = 0; i < op.controls.size(); ++i) {
    const auto& c = op.controls[i];
    if (c.qubit < 0 || c.qubit >= num_qubits) {
      throw ValidationError("control qubit " + std::to_string(c.qubit) +
                            " out of range");
    }
    if (c.qubit == op.target) {
      throw ValidationError("control overlaps target qubit " +
                            std::to_string(c.qubit));
    }
    if (c.polarity != 0 && c.polarity != 1) {
      throw ValidationError("control polarity must be 0 or 1");
    }
    for (std::size_t j = i + 1; j < op.controls.size(); ++j) {
      if (op.controls[j].qubit == c.qubit) {
        throw ValidationError("repeated control qubit " + std::to_string(c.qubit));
      }
    }
  }
  if (has_angle(op.kind) && !std::isfinite(op.angle)) {
    throw ValidationError("gate angle is not finite");
  }
}

struct ControlMask {
  std::uint64_t mask = 0;  // bits that must be checked
  std::uint64_t value = 0; // required bit values under mask
};

ControlMask control_mask(int num_qubits, const GateOp& op) {
  ControlMask cm;
  for (const auto& c : op.controls) {
    const std::uint64_t b = qubit_bit(num_qubits, c.qubit);
    cm.mask |= b;
    if (c.polarity == 1) cm.value |= b;
  }
  return cm;
}

}  // namespace

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::RX:
      return "RX";
    case GateKind::RY:
      return "RY";
    case GateKind::RZ:
      return "RZ";
    case GateKind::X:
      return "X";
    case GateKind::CNOT:
      return "CNOT";
    case GateKind::CRX:
      return "CRX";
    case GateKind::CRY:
      return "CRY";
    case GateKind::CRZ:
      return "CRZ";
    case GateKind::CCRY:
      return "CCRY";
  }
  return "?";
}

bool has_angle(GateKind kind) {
  return kind != GateKind::X && kind != GateKind::CNOT;
}

int control_arity(GateKind kind) {
  switch (kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::X:
      return 0;
    case GateKind::CNOT:
    case GateKind::CRX:
    case GateKind::CRY:
    case GateKind::CRZ:
      return 1;
    case GateKind::CCRY:
      return 2;
  }
  return 0;
}

StateVector::StateVector(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw ConfigError("num_qubits must be in [1, " + std::to_string(kMaxQubits) +
                      "], got " + std::to_string(num_qubits));
  }
  num_qubits_ = num_qubits;
  amps_.assign(std::size_t{1} << num_qubits, cplx(0, 0));
  amps_[0] = cplx(1, 0);
}

StateVector StateVector::from_amplitudes(std::vector<cplx> amps) {
  const std::size_t len = amps.size();
  if (len < 2 || (len & (len - 1)) != 0) {
    throw ValidationError("amplitude vector length must be a power of two >= 2, got " +
                          std::to_string(len));
  }
  int n = 0;
  while ((std::size_t{1} << n) < len) ++n;
  if (n > kMaxQubits) {
    throw ValidationError("amplitude vector implies " + std::to_string(n) +
                          " qubits, max is " + std::to_string(kMaxQubits));
  }
  double norm_sq = 0.0;
  for (const cplx& a : amps) norm_sq += std::norm(a);
  if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-9) {
    throw ValidationError("amplitude vector norm deviates from 1 by more than 1e-9");
  }
  StateVector st;
  st.num_qubits_ = n;
  st.amps_ = std::move(amps);
  return st;
}

double StateVector::norm_sq() const {
  double acc = 0.0;
  for (const cplx& a : amps_) acc += std::norm(a);
  return acc;
}

void apply_gate(StateVector& state, const GateOp& op) {
  const int n = state.num_qubits();
  validate_op(n, op);

  cplx* a = state.amps().data();
  const std::uint64_t tbit = qubit_bit(n, op.target);
  const auto [cmask, cval] = control_mask(n, op);
  const std::uint64_t lo = tbit - 1;
  const std::uint64_t hi = ~lo;
  const std::int64_t pairs = static_cast<std::int64_t>(state.size() >> 1);

  const GateKind base = base_kind(op.kind);
  if (base == GateKind::X) {
    for_each_pair(pairs, [=](std::int64_t k) {
      const std::uint64_t u = static_cast<std::uint64_t>(k);
      const std::uint64_t i0 = ((u & hi) << 1) | (u & lo);
      if ((i0 & cmask) != cval) return;
      std::swap(a[i0], a[i0 | tbit]);
    });
    return;
  }

  if (base == GateKind::RY) {
    // Real 2x2 block; worth the special case, RY dominates the circuits here.
    const double c = std::cos(op.angle / 2.0);
    const double s = std::sin(op.angle / 2.0);
    for_each_pair(pairs, [=](std::int64_t k) {
      const std::uint64_t u = static_cast<std::uint64_t>(k);
      const std::uint64_t i0 = ((u & hi) << 1) | (u & lo);
      if ((i0 & cmask) != cval) return;
      const std::uint64_t i1 = i0 | tbit;
      const cplx a0 = a[i0];
      const cplx a1 = a[i1];
      a[i0] = c * a0 - s * a1;
      a[i1] = s * a0 + c * a1;
    });
    return;
  }

  const Mat2 u2 = gate_matrix(op.kind, op.angle);
  for_each_pair(pairs, [=](std::int64_t k) {
    const std::uint64_t u = static_cast<std::uint64_t>(k);
    const std::uint64_t i0 = ((u & hi) << 1) | (u & lo);
    if ((i0 & cmask) != cval) return;
    const std::uint64_t i1 = i0 | tbit;
    const cplx a0 = a[i0];
    const cplx a1 = a[i1];
    a[i0] = u2.u00 * a0 + u2.u01 * a1;
    a[i1] = u2.u10 * a0 + u2.u11 * a1;
  });
}

void apply_ops(StateVector& state, std::span<const GateOp> ops) {
  for (const GateOp& op : ops) apply_gate(state, op);
}

double probability_one(const StateVector& state, int qubit) {
  const int n = state.num_qubits();
  if (qubit < 0 || qubit >= n) {
    throw ValidationError("qubit " + std::to_string(qubit) + " out of range");
  }
  const std::uint64_t qbit = qubit_bit(n, qubit);
  const auto a = state.amps();
  double p = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i & qbit) p += std::norm(a[i]);
  }
  return p;
}

double probability_pattern(const StateVector& state, int qubit_a, int bit_a,
                           int qubit_b, int bit_b) {
  const int n = state.num_qubits();
  if (qubit_a < 0 || qubit_a >= n || qubit_b < 0 || qubit_b >= n) {
    throw ValidationError("pattern qubit out of range");
  }
  const std::uint64_t mask =
      qubit_bit(n, qubit_a) | qubit_bit(n, qubit_b);
  std::uint64_t want = 0;
  if (bit_a) want |= qubit_bit(n, qubit_a);
  if (bit_b) want |= qubit_bit(n, qubit_b);
  const auto a = state.amps();
  double p = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((i & mask) == want) p += std::norm(a[i]);
  }
  return p;
}

CMatrix unitary_of(std::span<const GateOp> ops, int num_qubits) {
  if (num_qubits < 1 || num_qubits > 6) {
    throw ConfigError("unitary_of is oracle-scale only: num_qubits must be in [1, 6]");
  }
  const std::size_t dim = std::size_t{1} << num_qubits;
  CMatrix m(dim, std::vector<cplx>(dim, cplx(0, 0)));
  for (std::size_t col = 0; col < dim; ++col) {
    std::vector<cplx> basis(dim, cplx(0, 0));
    basis[col] = cplx(1, 0);
    StateVector st = StateVector::from_amplitudes(std::move(basis));
    apply_ops(st, ops);
    for (std::size_t row = 0; row < dim; ++row) m[row][col] = st.amps()[row];
  }
  return m;
}

namespace ref {

void apply_gate(StateVector& state, const GateOp& op) {
  const int n = state.num_qubits();
  validate_op(n, op);

  const Mat2 u2 = gate_matrix(op.kind, op.angle);
  const std::uint64_t tbit = qubit_bit(n, op.target);
  const auto [cmask, cval] = control_mask(n, op);

  const auto old = std::vector<cplx>(state.amps().begin(), state.amps().end());
  cplx* out = state.amps().data();
  for (std::uint64_t i = 0; i < old.size(); ++i) {
    if (i & tbit) continue;
    if ((i & cmask) != cval) continue;
    const std::uint64_t j = i | tbit;
    out[i] = u2.u00 * old[i] + u2.u01 * old[j];
    out[j] = u2.u10 * old[i] + u2.u11 * old[j];
  }
}

double probability_one(const StateVector& state, int qubit) {
  const int n = state.num_qubits();
  if (qubit < 0 || qubit >= n) {
    throw ValidationError("qubit " + std::to_string(qubit) + " out of range");
  }
  double p = 0.0;
  for (std::uint64_t i = 0; i < state.size(); ++i) {
    const std::uint64_t bit = (i >> (n - 1 - qubit)) & 1u;
    if (bit) p += std::norm(state.amps()[i]);
  }
  return p;
}

}  // namespace ref

}  // namespace qcnn
