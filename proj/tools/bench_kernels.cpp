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

// Compares the OpenMP statevector kernels against the serial reference
// implementation, and reports end-to-end forward / gradient throughput for
// the default architecture.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "qcnn/circuit.hpp"
#include "qcnn/encoding.hpp"
#include "qcnn/rng.hpp"
#include "qcnn/statevector.hpp"
#include "qcnn/training.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

qcnn::EncodedImage random_image(qcnn::Rng& rng) {
  std::array<double, qcnn::kImagePixels> pixels;
  for (double& p : pixels) p = rng.next_unit();
  qcnn::EncodedImage img;
  img.coeffs = qcnn::normalize_vector(pixels);
  img.label = 0;
  return img;
}

std::vector<qcnn::GateOp> random_ops(int num_qubits, int count) {
  qcnn::Rng rng(7);
  std::vector<qcnn::GateOp> ops;
  for (int i = 0; i < count; ++i) {
    const int t = static_cast<int>(rng.next_below(num_qubits));
    int c = static_cast<int>(rng.next_below(num_qubits));
    while (c == t) c = static_cast<int>(rng.next_below(num_qubits));
    switch (i % 4) {
      case 0:
        ops.push_back(qcnn::GateOp::ry(t, rng.next_uniform(-1, 1)));
        break;
      case 1:
        ops.push_back(qcnn::GateOp::rz(t, rng.next_uniform(-1, 1)));
        break;
      case 2:
        ops.push_back(qcnn::GateOp::cnot(c, t));
        break;
      default:
        ops.push_back(qcnn::GateOp::cry(c, t, rng.next_uniform(-1, 1)));
        break;
    }
  }
  return ops;
}

double time_gates(int num_qubits, const std::vector<qcnn::GateOp>& ops, int reps,
                  bool use_ref) {
  qcnn::StateVector state(num_qubits);
  const auto start = Clock::now();
  for (int r = 0; r < reps; ++r) {
    for (const auto& op : ops) {
      if (use_ref) {
        qcnn::ref::apply_gate(state, op);
      } else {
        qcnn::apply_gate(state, op);
      }
    }
  }
  return seconds_since(start);
}

/// Strided production kernels (serial and OpenMP-forced) against the
/// textbook out-of-place reference.
void bench_gate_kernels(int num_qubits, int reps) {
  const auto ops = random_ops(num_qubits, 64);
  const double gates = static_cast<double>(reps) * ops.size();

  qcnn::set_parallel_pair_threshold(std::int64_t{1} << 14);
  const double t_serial = time_gates(num_qubits, ops, reps, false);
  qcnn::set_parallel_pair_threshold(1);
  const double t_parallel = time_gates(num_qubits, ops, reps, false);
  qcnn::set_parallel_pair_threshold(std::int64_t{1} << 14);
  const double t_ref = time_gates(num_qubits, ops, reps, true);

  std::printf(
      "%2d qubits: strided %9.0f gates/s | strided+omp %9.0f gates/s | "
      "textbook ref %9.0f gates/s\n",
      num_qubits, gates / t_serial, gates / t_parallel, gates / t_ref);
}

/// Worker scaling of the sample-level parallelism the trainer actually uses.
void bench_pipeline() {
  const qcnn::ParamCircuit circuit = qcnn::build_qcnn_circuit({});
  const qcnn::GradEngine engine(qcnn::lower(circuit));
  qcnn::Rng rng(11);
  std::vector<double> theta(circuit.num_params);
  for (double& t : theta) t = rng.next_uniform(-0.5, 0.5);
  const qcnn::EncodedImage img = random_image(rng);

  constexpr int kForwardReps = 50;
  auto start = Clock::now();
  for (int r = 0; r < kForwardReps; ++r) {
    volatile double sink = qcnn::forward(circuit, theta, img)[0];
    (void)sink;
  }
  const double t_forward = seconds_since(start) / kForwardReps;
  std::printf("full architecture: forward %.3f ms (%d params, fast path %s)\n",
              1e3 * t_forward, circuit.num_params,
              engine.fast_path() ? "on" : "off");

  constexpr int kGradReps = 5;
  const qcnn::Logits dL = {0.25, -0.25, 0.5, -0.5};
  const int max_threads = omp_get_max_threads();
  double t_one = 0.0;
  for (int workers = 1; workers <= max_threads; workers *= 2) {
    omp_set_num_threads(workers);
    start = Clock::now();
    for (int r = 0; r < kGradReps; ++r) {
      volatile double sink = engine.gradient(theta, img, dL)[0];
      (void)sink;
    }
    const double t_grad = seconds_since(start) / kGradReps;
    if (workers == 1) t_one = t_grad;
    std::printf("parameter-shift gradient, %d worker%s: %.1f ms (speedup %.2fx)\n",
                workers, workers == 1 ? " " : "s", 1e3 * t_grad, t_one / t_grad);
  }
  omp_set_num_threads(max_threads);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  bench_gate_kernels(10, 200);
  bench_gate_kernels(13, 50);
  bench_pipeline();
  return 0;
}
