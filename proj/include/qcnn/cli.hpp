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
#include <optional>
#include <string>
#include <vector>

#include "qcnn/circuit.hpp"
#include "qcnn/training.hpp"

namespace qcnn {

/// Exit codes: 0 success, 2 input/IO, 3 config or digest mismatch,
/// 4 verification failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitVerification = 4;

struct RunConfig {
  std::string command;  // train | eval | gradcheck | inspect
  std::string model = "qcnn";
  std::string arch = "full";          // full | reference
  std::string entangler = "cry";      // cry | cnot
  int regular_layers = 8;
  bool unshared_sublayers = false;
  bool no_final_filter = false;
  bool no_output_cascade = false;

  std::string dataset = "mnist";      // mnist | fashion
  std::string data_dir;               // from flag or QCNN_DATA_DIR
  std::string images_path;            // explicit train pair override
  std::string labels_path;
  std::string test_images_path;
  std::string test_labels_path;
  std::array<int, 4> classes = {0, 1, 2, 3};
  std::optional<int> limit_per_class;

  Hyperparams hyper;
  std::string out_dir = "runs/out";
  std::string checkpoint_path;        // eval input
  int workers = 0;                    // 0: all available cores
  int gradcheck_samples = 5;
  bool corrupt_shift = false;         // gradcheck negative-control hook
};

ArchitectureConfig arch_config_from(const RunConfig& cfg);
ParamCircuit build_circuit_from(const RunConfig& cfg);

int cmd_train(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg);
int cmd_gradcheck(const RunConfig& cfg);
int cmd_inspect(const RunConfig& cfg);

/// Parses argv (not including the program name) and dispatches. Flags
/// override values from an optional key-value config file (--config), which
/// overrides defaults.
int run_cli(const std::vector<std::string>& args);

}  // namespace qcnn
