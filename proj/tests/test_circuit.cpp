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

#include <fstream>
#include <algorithm>
#include <map>
#include <numbers>
#include <set>

#include "doctest.h"
#include "qcnn/circuit.hpp"
#include "qcnn/encoding.hpp"
#include "qcnn/errors.hpp"
#include "support/test_oracles.hpp"

using namespace qcnn;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_theta(Rng& rng, int n, double lo = -kPi, double hi = kPi) {
  std::vector<double> theta(n);
  for (double& t : theta) t = rng.next_uniform(lo, hi);
  return theta;
}

StateVector run(const ParamCircuit& circuit, std::span<const double> theta,
                const EncodedImage& img) {
  StateVector st = amplitude_encode(img, circuit.num_qubits);
  const auto bound = bind_parameters(circuit, theta);
  apply_ops(st, bound);
  return st;
}

double fidelity(const StateVector& a, const StateVector& b) {
  cplx overlap(0, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    overlap += std::conj(a.amps()[i]) * b.amps()[i];
  }
  return std::norm(overlap);
}

/// Ops of one stage, located via the stage-mark table.
std::pair<std::size_t, std::size_t> stage_range(const ParamCircuit& c,
                                                const std::string& name) {
  for (std::size_t m = 0; m < c.stage_marks.size(); ++m) {
    if (c.stage_marks[m].first == name) {
      const std::size_t begin = c.stage_marks[m].second;
      const std::size_t end = m + 1 < c.stage_marks.size()
                                  ? c.stage_marks[m + 1].second
                                  : c.ops.size();
      return {begin, end};
    }
  }
  FAIL("stage not found: ", name);
  return {0, 0};
}

}  // namespace

TEST_SUITE("circuit") {

TEST_CASE("default parameter budget is 67 and scales with regular layers") {
  CHECK(parameter_count(build_qcnn_circuit({})) == 67);

  ArchitectureConfig nine;
  nine.num_regular_layers = 9;
  CHECK(parameter_count(build_qcnn_circuit(nine)) == 71);

  // Construction-derived reference count: the full budget minus the second
  // pooling (2), the final filter (4), and the twelve entangler angles that
  // become CNOTs (4 each in F4, F3 and the conv filter).
  CHECK(parameter_count(build_reference_circuit({})) == 49);
  CHECK(parameter_count(build_reference_circuit({})) <
        parameter_count(build_qcnn_circuit({})));

  ArchitectureConfig unshared;
  unshared.share_across_sublayers = false;
  CHECK(parameter_count(build_qcnn_circuit(unshared)) > 67);
}

TEST_CASE("structure invariants") {
  const ParamCircuit c = build_qcnn_circuit({});
  c.validate();
  CHECK(c.num_qubits == 13);
  CHECK(c.data_qubits == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(c.ancilla_qubits == std::vector<int>{9, 10, 11, 12});
  CHECK(c.readout == std::vector<int>{9, 10, 11, 12});
  CHECK(c.virtual_qubit == 8);

  SUBCASE("readout ancillas receive no gates before the cascade") {
    const auto [cascade_begin, cascade_end] = stage_range(c, "cascade");
    CHECK(c.first_ancilla_op() == cascade_begin);
    CHECK(cascade_end == c.ops.size());
  }

  SUBCASE("virtual wire is touched only inside F3") {
    const auto [f3_begin, f3_end] = stage_range(c, "f3.s1");
    const auto [f3s2_begin, f3s2_end] = stage_range(c, "f3.s2");
    for (std::size_t i = 0; i < c.ops.size(); ++i) {
      const GateOp& g = c.ops[i].gate;
      bool touches = g.target == c.virtual_qubit;
      for (const auto& ctl : g.controls) touches |= ctl.qubit == c.virtual_qubit;
      if (!touches) continue;
      const bool in_f3 = (i >= f3_begin && i < f3_end) ||
                         (i >= f3s2_begin && i < f3s2_end);
      CHECK(in_f3);
    }
  }

  SUBCASE("every parameter is referenced at least once") {
    std::set<int> seen;
    for (const CircuitOp& op : c.ops) {
      if (op.param) seen.insert(op.param->param_index);
    }
    CHECK(static_cast<int>(seen.size()) == c.num_params);
  }
}

TEST_CASE("translational sharing: sublayers apply the same angle multiset") {
  Rng rng(11);
  const ParamCircuit c = build_qcnn_circuit({});
  const auto theta = random_theta(rng, c.num_params);
  const auto bound = bind_parameters(c, theta);

  for (const char* name : {"f4", "f3", "f2", "conv"}) {
    const auto [b1, e1] = stage_range(c, std::string(name) + ".s1");
    const auto [b2, e2] = stage_range(c, std::string(name) + ".s2");
    std::multiset<double> s1, s2;
    for (std::size_t i = b1; i < e1; ++i) {
      if (has_angle(bound[i].kind)) s1.insert(bound[i].angle);
    }
    for (std::size_t i = b2; i < e2; ++i) {
      if (has_angle(bound[i].kind)) s2.insert(bound[i].angle);
    }
    CHECK(s1 == s2);
  }
}

TEST_CASE("bind_parameters resolves angles with locality and sharing") {
  const ParamCircuit c = build_qcnn_circuit({});
  std::vector<double> zeros(c.num_params, 0.0);
  const auto bound0 = bind_parameters(c, zeros);
  for (std::size_t i = 0; i < c.ops.size(); ++i) {
    if (c.ops[i].param) CHECK(bound0[i].angle == 0.0);
  }

  SUBCASE("perturbing one parameter changes only its referencing ops") {
    std::vector<double> theta = zeros;
    theta[5] = 0.375;
    const auto bound = bind_parameters(c, theta);
    for (std::size_t i = 0; i < c.ops.size(); ++i) {
      if (c.ops[i].param && c.ops[i].param->param_index == 5) {
        CHECK(bound[i].angle == 0.375 * c.ops[i].param->coefficient);
        CHECK(bound[i].angle != bound0[i].angle);
      } else {
        CHECK(bound[i].angle == bound0[i].angle);
      }
    }
  }

  SUBCASE("shared parameters resolve to the same angle at every site") {
    Rng rng(12);
    const auto theta = random_theta(rng, c.num_params);
    const auto bound = bind_parameters(c, theta);
    std::map<int, std::set<double>> by_param;
    for (std::size_t i = 0; i < c.ops.size(); ++i) {
      if (c.ops[i].param && c.ops[i].param->coefficient == 1.0) {
        by_param[c.ops[i].param->param_index].insert(bound[i].angle);
      }
    }
    for (const auto& [param, angles] : by_param) CHECK(angles.size() == 1);
  }

  SUBCASE("length mismatch is rejected") {
    CHECK_THROWS_AS(bind_parameters(c, std::span(zeros).subspan(0, 10)),
                    ValidationError);
  }
}

TEST_CASE("lower() rewrites onto the bare gate set") {
  SUBCASE("a single CRY becomes the 4-op pattern with +-1/2 coefficients") {
    ParamCircuit toy;
    toy.num_qubits = 2;
    toy.num_params = 1;
    toy.readout = {};
    toy.ops.push_back({GateOp::cry(0, 1, 0.0), ParamRef{0, 1.0, 0.0}});
    const ParamCircuit low = lower(toy);
    REQUIRE(low.ops.size() == 4);
    CHECK(low.ops[0].gate.kind == GateKind::RY);
    CHECK(low.ops[0].param->coefficient == 0.5);
    CHECK(low.ops[1].gate.kind == GateKind::CNOT);
    CHECK(low.ops[2].param->coefficient == -0.5);
    CHECK(low.ops[3].gate.kind == GateKind::CNOT);
  }

  SUBCASE("a bare RY passes through unchanged") {
    ParamCircuit toy;
    toy.num_qubits = 1;
    toy.num_params = 1;
    toy.ops.push_back({GateOp::ry(0, 0.0), ParamRef{0, 1.0, 0.0}});
    const ParamCircuit low = lower(toy);
    REQUIRE(low.ops.size() == 1);
    CHECK(low.ops[0].gate == toy.ops[0].gate);
  }

  SUBCASE("lowered circuits contain only the bare kinds") {
    const ParamCircuit low = lower(build_qcnn_circuit({}));
    for (const CircuitOp& op : low.ops) {
      const GateKind k = op.gate.kind;
      CHECK((k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ ||
             k == GateKind::CNOT || k == GateKind::X));
    }
  }

  SUBCASE("native and lowered states agree for random parameters") {
    Rng rng(13);
    const ParamCircuit native = build_qcnn_circuit({});
    const ParamCircuit low = lower(native);
    for (int trial = 0; trial < 10; ++trial) {
      const auto theta = random_theta(rng, native.num_params);
      const EncodedImage img = test::random_encoded_image(rng);
      const StateVector a = run(native, theta, img);
      const StateVector b = run(low, theta, img);
      CHECK(fidelity(a, b) >= 1.0 - 1e-10);
    }
  }
}

TEST_CASE("zero parameters: every parameterized gate is identity") {
  // The fixed CNOT entanglers (F2 blocks, regular-layer rings) are basis
  // permutations, so at theta = 0 the pre-cascade state is the encoding
  // routed through that permutation network; an independent index-walk
  // oracle predicts it exactly.
  const ParamCircuit c = build_qcnn_circuit({});
  std::vector<double> zeros(c.num_params, 0.0);
  const auto bound = bind_parameters(c, zeros);
  for (std::size_t i = 0; i < c.ops.size(); ++i) {
    if (c.ops[i].param) CHECK(bound[i].angle == 0.0);
  }

  Rng rng(14);
  const EncodedImage img = test::random_encoded_image(rng);
  StateVector st = amplitude_encode(img, c.num_qubits);
  const std::size_t cascade = c.first_ancilla_op();
  for (std::size_t i = 0; i < cascade; ++i) apply_gate(st, bound[i]);

  const auto permute = [&](std::uint64_t index) {
    for (std::size_t i = 0; i < cascade; ++i) {
      if (c.ops[i].param) continue;  // identity at theta = 0
      REQUIRE(c.ops[i].gate.kind == GateKind::CNOT);
      const auto& ctl = c.ops[i].gate.controls[0];
      const std::uint64_t cbit = qubit_bit(c.num_qubits, ctl.qubit);
      const bool active = ((index & cbit) != 0) == (ctl.polarity == 1);
      if (active) index ^= qubit_bit(c.num_qubits, c.ops[i].gate.target);
    }
    return index;
  };

  std::vector<cplx> expected(st.size(), cplx(0, 0));
  for (int m = 0; m < kImagePixels; ++m) {
    expected[permute(static_cast<std::uint64_t>(m) << 5)] = cplx(img.coeffs[m], 0);
  }
  for (std::size_t i = 0; i < st.size(); ++i) {
    CHECK(std::abs(st.amps()[i] - expected[i]) < 1e-12);
  }

  // The cascade then writes the (3,7) code-pattern probabilities of that
  // permuted state one-hot onto the ancillas.
  StateVector permuted = StateVector::from_amplitudes(expected);
  for (std::size_t i = cascade; i < bound.size(); ++i) apply_gate(st, bound[i]);
  for (int code = 0; code < 4; ++code) {
    const double joint =
        probability_pattern(permuted, 3, (code >> 1) & 1, 7, code & 1);
    CHECK(probability_one(st, c.readout[code]) ==
          doctest::Approx(joint).epsilon(1e-10));
  }
}

TEST_CASE("basis image e0 with zero parameters reads out class 0") {
  const ParamCircuit c = build_qcnn_circuit({});
  std::vector<double> zeros(c.num_params, 0.0);
  EncodedImage img;
  img.coeffs.fill(0.0);
  img.coeffs[0] = 1.0;
  img.label = 0;
  const StateVector st = run(c, zeros, img);
  CHECK(probability_one(st, c.readout[0]) == doctest::Approx(1.0).epsilon(1e-10));
  for (int i = 1; i < 4; ++i) {
    CHECK(probability_one(st, c.readout[i]) < 1e-10);
  }
}

TEST_CASE("full circuit agrees with the serial reference kernels") {
  Rng rng(17);
  const ParamCircuit c = build_qcnn_circuit({});
  const auto theta = random_theta(rng, c.num_params);
  const EncodedImage img = test::random_encoded_image(rng);
  const auto bound = bind_parameters(c, theta);

  StateVector fast = amplitude_encode(img, c.num_qubits);
  StateVector slow = amplitude_encode(img, c.num_qubits);
  for (const GateOp& op : bound) {
    apply_gate(fast, op);
    ref::apply_gate(slow, op);
  }
  for (std::size_t i = 0; i < fast.size(); ++i) {
    CHECK(std::abs(fast.amps()[i] - slow.amps()[i]) < 1e-12);
  }
  for (int q : c.readout) {
    CHECK(probability_one(fast, q) ==
          doctest::Approx(ref::probability_one(slow, q)).epsilon(1e-12));
  }
}

TEST_CASE("ancilla one-hot partition: readout probabilities sum to 1") {
  Rng rng(15);
  const ParamCircuit c = build_qcnn_circuit({});
  for (int trial = 0; trial < 20; ++trial) {
    const auto theta = random_theta(rng, c.num_params);
    const EncodedImage img = test::random_encoded_image(rng);
    const StateVector st = run(c, theta, img);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) sum += probability_one(st, c.readout[i]);
    CHECK(std::abs(sum - 1.0) < 1e-10);
  }
}

TEST_CASE("reference circuit") {
  const ParamCircuit ref = build_reference_circuit({});
  ref.validate();

  SUBCASE("no parameterized entanglers") {
    // Pooling keeps its parameterized CRZ/CRX gates; entanglement is all
    // fixed CNOTs, so no CRY survives anywhere.
    for (const CircuitOp& op : ref.ops) {
      CHECK(op.gate.kind != GateKind::CRY);
      CHECK(op.gate.kind != GateKind::CCRY);
      if (op.param) {
        CHECK((op.gate.kind == GateKind::RY || op.gate.kind == GateKind::CRZ ||
               op.gate.kind == GateKind::CRX));
      }
    }
  }

  SUBCASE("no post-regular structure, ancillas entangled by one CNOT each") {
    const auto [begin, end] = stage_range(ref, "ancilla_entangle");
    CHECK(end == ref.ops.size());
    CHECK(end - begin == 4);
    for (std::size_t i = begin; i < end; ++i) {
      CHECK(ref.ops[i].gate.kind == GateKind::CNOT);
    }
    for (const auto& [name, index] : ref.stage_marks) {
      CHECK(name != "pool2");
      CHECK(name != "final");
      CHECK(name != "cascade");
    }
  }

  SUBCASE("zero parameters copy partner-qubit populations onto ancillas") {
    // The fixed CNOT entanglers stay active at theta = 0, so the copied
    // populations are those of the state reaching the entangling stage.
    Rng rng(16);
    std::vector<double> zeros(ref.num_params, 0.0);
    const EncodedImage img = test::random_encoded_image(rng);
    const StateVector st = run(ref, zeros, img);

    StateVector pre = amplitude_encode(img, ref.num_qubits);
    const auto bound = bind_parameters(ref, zeros);
    for (std::size_t i = 0; i < ref.first_ancilla_op(); ++i) {
      apply_gate(pre, bound[i]);
    }
    const int partners[4] = {1, 3, 5, 7};
    for (int i = 0; i < 4; ++i) {
      CHECK(probability_one(st, ref.readout[i]) ==
            doctest::Approx(probability_one(pre, partners[i])).epsilon(1e-10));
    }
  }
}

TEST_CASE("dump matches the reviewed golden file") {
  ArchitectureConfig cfg;
  cfg.num_regular_layers = 1;
  const std::string dump = dump_circuit(build_reference_circuit(cfg));

  std::ifstream golden(std::string(QCNN_TEST_DATA_DIR) +
                       "/golden_reference_r1.txt");
  REQUIRE(golden.good());
  std::string expected((std::istreambuf_iterator<char>(golden)),
                       std::istreambuf_iterator<char>());
  CHECK(dump == expected);
}

TEST_CASE("dump and digest are deterministic and distinct per config") {
  const ParamCircuit a = build_qcnn_circuit({});
  const ParamCircuit b = build_qcnn_circuit({});
  CHECK(a.arch_digest == b.arch_digest);
  CHECK(dump_circuit(a) == dump_circuit(b));

  ArchitectureConfig cnot_cfg;
  cnot_cfg.entangler = Entangler::Cnot;
  CHECK(build_qcnn_circuit(cnot_cfg).arch_digest != a.arch_digest);
  CHECK(build_reference_circuit({}).arch_digest != a.arch_digest);

  const std::string dump = dump_circuit(a);
  CHECK(dump.find("qcnn-circuit v1\n") == 0);
  CHECK(dump.find("params: 67\n") != std::string::npos);
  CHECK(dump.find("stage cascade\n") != std::string::npos);
  CHECK(dump.find("CCRY t=9 c=3:0,7:0 angle=3.14159") != std::string::npos);
}

}  // TEST_SUITE
