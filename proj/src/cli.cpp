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

#include "qcnn/cli.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcnn/baseline.hpp"
#include "qcnn/dataset.hpp"
#include "qcnn/errors.hpp"
#include "qcnn/rng.hpp"

namespace qcnn {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kBaselineDigest = "ccnn-188-v1";

struct DataPaths {
  std::string train_images, train_labels, test_images, test_labels;
};

DataPaths resolve_paths(const RunConfig& cfg) {
  DataPaths p;
  const std::string base =
      cfg.data_dir.empty() ? std::string(".") : cfg.data_dir;
  const std::string dir = base + "/" + cfg.dataset;
  p.train_images = cfg.images_path.empty() ? dir + "/train-images-idx3-ubyte"
                                           : cfg.images_path;
  p.train_labels = cfg.labels_path.empty() ? dir + "/train-labels-idx1-ubyte"
                                           : cfg.labels_path;
  p.test_images = cfg.test_images_path.empty() ? dir + "/t10k-images-idx3-ubyte"
                                               : cfg.test_images_path;
  p.test_labels = cfg.test_labels_path.empty() ? dir + "/t10k-labels-idx1-ubyte"
                                               : cfg.test_labels_path;
  return p;
}

void require_file(const std::string& path) {
  if (!fs::exists(path)) {
    throw FormatError("dataset file not found: " + path);
  }
}

json config_json(const RunConfig& cfg) {
  json j;
  j["model"] = cfg.model;
  j["arch"] = cfg.arch;
  j["entangler"] = cfg.entangler;
  j["regular_layers"] = cfg.regular_layers;
  j["unshared_sublayers"] = cfg.unshared_sublayers;
  j["no_final_filter"] = cfg.no_final_filter;
  j["no_output_cascade"] = cfg.no_output_cascade;
  j["dataset"] = cfg.dataset;
  j["classes"] = cfg.classes;
  j["limit_per_class"] = cfg.limit_per_class ? json(*cfg.limit_per_class) : json();
  j["learning_rate"] = cfg.hyper.learning_rate;
  j["epochs"] = cfg.hyper.epochs;
  j["batch_size"] = cfg.hyper.batch_size;
  j["adam_beta1"] = cfg.hyper.adam_beta1;
  j["adam_beta2"] = cfg.hyper.adam_beta2;
  j["adam_eps"] = cfg.hyper.adam_eps;
  j["seed"] = cfg.hyper.seed;
  j["rescale"] = "box";
  return j;
}

json counts_json(const std::map<int, int>& counts) {
  json j = json::object();
  for (const auto& [label, count] : counts) j[std::to_string(label)] = count;
  return j;
}

void set_workers(const RunConfig& cfg) {
  if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
}

std::string digest_of(const RunConfig& cfg) {
  if (cfg.model == "baseline") return kBaselineDigest;
  return build_circuit_from(cfg).digest_hex();
}

void print_confusion(const EvalResult& result) {
  std::printf("confusion (rows true, cols predicted):\n");
  for (int i = 0; i < 4; ++i) {
    std::printf("  ");
    for (int j = 0; j < 4; ++j) std::printf("%6d", result.confusion[i][j]);
    std::printf("\n");
  }
}

/// Deterministic random (theta, image, label) samples for gradient checks;
/// no dataset needed.
struct GradSample {
  std::vector<double> theta;
  EncodedImage img;
  int label;
};

GradSample random_sample(Rng& rng, int num_params, int index) {
  GradSample s;
  s.theta.resize(num_params);
  for (double& t : s.theta) t = rng.next_uniform(-0.5, 0.5);
  std::array<double, kImagePixels> pixels;
  for (double& p : pixels) p = rng.next_unit();
  s.img.coeffs = normalize_vector(pixels);
  s.img.label = index % 4;
  s.img.source_id = index;
  s.label = index % 4;
  return s;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const FormatError*>(&e)) return kExitInput;
  if (dynamic_cast<const ValidationError*>(&e)) return kExitInput;
  return kExitInput;
}

}  // namespace

ArchitectureConfig arch_config_from(const RunConfig& cfg) {
  ArchitectureConfig arch;
  arch.num_regular_layers = cfg.regular_layers;
  if (cfg.entangler == "cry") {
    arch.entangler = Entangler::ParameterizedCry;
  } else if (cfg.entangler == "cnot") {
    arch.entangler = Entangler::Cnot;
  } else {
    throw ConfigError("unknown entangler: " + cfg.entangler);
  }
  arch.share_across_sublayers = !cfg.unshared_sublayers;
  arch.include_final_filter = !cfg.no_final_filter;
  arch.include_output_cascade = !cfg.no_output_cascade;
  return arch;
}

ParamCircuit build_circuit_from(const RunConfig& cfg) {
  const ArchitectureConfig arch = arch_config_from(cfg);
  if (cfg.arch == "full") return build_qcnn_circuit(arch);
  if (cfg.arch == "reference") return build_reference_circuit(arch);
  throw ConfigError("unknown arch: " + cfg.arch);
}

int cmd_train(const RunConfig& cfg) {
  set_workers(cfg);
  const DataPaths paths = resolve_paths(cfg);
  require_file(paths.train_images);
  require_file(paths.train_labels);
  require_file(paths.test_images);
  require_file(paths.test_labels);

  const auto train_records = load_idx(paths.train_images, paths.train_labels);
  const auto test_records = load_idx(paths.test_images, paths.test_labels);
  const ClassSubsetSpec spec{cfg.classes};

  fs::create_directories(cfg.out_dir);

  json manifest;
  manifest["command"] = "train";
  manifest["config"] = config_json(cfg);
  manifest["paths"] = {{"train_images", paths.train_images},
                       {"train_labels", paths.train_labels},
                       {"test_images", paths.test_images},
                       {"test_labels", paths.test_labels}};
  manifest["source_counts"] = {{"train", counts_json(count_by_class(train_records))},
                               {"test", counts_json(count_by_class(test_records))}};

  CheckpointData ckpt;
  ckpt.model = cfg.model;
  ckpt.config_json = config_json(cfg).dump();

  std::vector<EpochMetrics> history;
  if (cfg.model == "qcnn") {
    const auto train_set = make_dataset(train_records, spec, cfg.limit_per_class);
    const auto test_set = make_dataset(test_records, spec, cfg.limit_per_class);
    manifest["subset_sizes"] = {{"train", train_set.size()}, {"test", test_set.size()}};

    const ParamCircuit circuit = build_circuit_from(cfg);
    manifest["parameter_count"] = circuit.num_params;
    manifest["arch_digest"] = circuit.digest_hex();

    const TrainState state = train(circuit, train_set, test_set, cfg.hyper);
    history = state.history;

    ckpt.arch_digest = circuit.digest_hex();
    ckpt.num_params = circuit.num_params;
    ckpt.step = state.step;
    ckpt.theta = state.theta;
    ckpt.adam_m = state.adam_m;
    ckpt.adam_v = state.adam_v;
  } else if (cfg.model == "baseline") {
    const auto train_set = make_raw_subset(train_records, spec, cfg.limit_per_class);
    const auto test_set = make_raw_subset(test_records, spec, cfg.limit_per_class);
    manifest["subset_sizes"] = {{"train", train_set.size()}, {"test", test_set.size()}};
    manifest["parameter_count"] = BaselineModel::kNumParams;
    manifest["arch_digest"] = kBaselineDigest;

    const BaselineTrainResult result = baseline_train(train_set, test_set, cfg.hyper);
    history = result.state.history;

    ckpt.arch_digest = kBaselineDigest;
    ckpt.num_params = BaselineModel::kNumParams;
    ckpt.step = result.state.step;
    ckpt.theta = result.state.theta;
    ckpt.adam_m = result.state.adam_m;
    ckpt.adam_v = result.state.adam_v;
  } else {
    throw ConfigError("unknown model: " + cfg.model);
  }

  save_checkpoint(cfg.out_dir + "/checkpoint.json", ckpt);
  write_metrics_csv(cfg.out_dir + "/metrics.csv", history);
  write_metrics_json(cfg.out_dir + "/metrics.json", history);
  {
    std::ofstream out(cfg.out_dir + "/manifest.json");
    if (!out) throw FormatError("cannot write manifest in " + cfg.out_dir);
    out << manifest.dump(2) << "\n";
  }

  if (!history.empty()) {
    const EpochMetrics& last = history.back();
    std::printf("epoch %d: train_loss=%.6f train_acc=%.4f test_acc=%.4f\n",
                last.epoch, last.train_loss, last.train_acc, last.test_acc);
  }
  std::printf("wrote %s/{checkpoint.json,metrics.csv,metrics.json,manifest.json}\n",
              cfg.out_dir.c_str());
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg) {
  set_workers(cfg);
  if (cfg.checkpoint_path.empty()) {
    throw ConfigError("eval requires --checkpoint");
  }
  require_file(cfg.checkpoint_path);
  const CheckpointData ckpt = load_checkpoint(cfg.checkpoint_path);

  if (ckpt.model != cfg.model) {
    throw ConfigError("checkpoint model '" + ckpt.model +
                      "' does not match --model " + cfg.model);
  }
  const std::string expected_digest = digest_of(cfg);
  if (ckpt.arch_digest != expected_digest) {
    throw ConfigError("arch digest mismatch: checkpoint " + ckpt.arch_digest +
                      " vs configured " + expected_digest);
  }
  {
    const json stored = json::parse(ckpt.config_json);
    const std::array<int, 4> stored_classes = stored.at("classes");
    if (stored_classes != cfg.classes) {
      throw ConfigError("--classes does not match the checkpoint's class subset");
    }
  }

  const DataPaths paths = resolve_paths(cfg);
  require_file(paths.test_images);
  require_file(paths.test_labels);
  const auto test_records = load_idx(paths.test_images, paths.test_labels);
  const ClassSubsetSpec spec{cfg.classes};

  EvalResult result;
  std::size_t dataset_size = 0;
  if (cfg.model == "qcnn") {
    const auto test_set = make_dataset(test_records, spec, cfg.limit_per_class);
    const ParamCircuit circuit = build_circuit_from(cfg);
    result = evaluate(circuit, ckpt.theta, test_set);
    dataset_size = test_set.size();
  } else {
    const auto test_set = make_raw_subset(test_records, spec, cfg.limit_per_class);
    BaselineModel model;
    model.params = ckpt.theta;
    result = baseline_evaluate(model, test_set);
    dataset_size = test_set.size();
  }

  std::printf("accuracy: %.17g (%zu images)\n", result.accuracy, dataset_size);
  print_confusion(result);

  fs::create_directories(cfg.out_dir);
  json record;
  record["command"] = "eval";
  record["checkpoint"] = cfg.checkpoint_path;
  record["accuracy"] = result.accuracy;
  record["confusion"] = result.confusion;
  record["dataset_size"] = dataset_size;
  record["config"] = config_json(cfg);
  std::ofstream out(cfg.out_dir + "/evaluation.json");
  if (!out) throw FormatError("cannot write evaluation record in " + cfg.out_dir);
  out << record.dump(2) << "\n";
  return kExitOk;
}

int cmd_gradcheck(const RunConfig& cfg) {
  set_workers(cfg);
  constexpr double kTolerance = 1e-6;
  constexpr double kFdStep = 1e-4;

  const ParamCircuit circuit = build_circuit_from(cfg);
  const ParamCircuit lowered = lower(circuit);
  const GradEngine engine(lowered);

  Rng rng(cfg.hyper.seed);
  double max_dev = 0.0;
  for (int s = 0; s < cfg.gradcheck_samples; ++s) {
    const GradSample sample = random_sample(rng, circuit.num_params, s);

    Logits base{};
    const LossGrad lg =
        softmax_cross_entropy(forward(lowered, sample.theta, sample.img), sample.label);
    std::vector<double> shift_grad =
        engine.gradient(sample.theta, sample.img, lg.dlogits, &base);
    if (cfg.corrupt_shift) {
      // Negative-control hook: bias every component well past tolerance.
      for (double& g : shift_grad) g += 1e-4;
    }

    for (int k = 0; k < circuit.num_params; ++k) {
      std::vector<double> theta = sample.theta;
      theta[k] = sample.theta[k] + kFdStep;
      const double lp =
          softmax_cross_entropy(forward(lowered, theta, sample.img), sample.label).loss;
      theta[k] = sample.theta[k] - kFdStep;
      const double lm =
          softmax_cross_entropy(forward(lowered, theta, sample.img), sample.label).loss;
      const double fd = (lp - lm) / (2.0 * kFdStep);
      max_dev = std::max(max_dev, std::abs(fd - shift_grad[k]));
    }
  }

  std::printf("gradcheck: %d samples, %d parameters, max |shift - fd| = %.3e\n",
              cfg.gradcheck_samples, circuit.num_params, max_dev);
  if (max_dev > kTolerance) {
    std::printf("gradcheck FAILED (tolerance %.1e)\n", kTolerance);
    return kExitVerification;
  }
  std::printf("gradcheck OK (tolerance %.1e)\n", kTolerance);
  return kExitOk;
}

int cmd_inspect(const RunConfig& cfg) {
  if (cfg.model == "baseline") {
    std::printf("model: baseline\nparameters: %d\narch_digest: %s\n",
                BaselineModel::kNumParams, kBaselineDigest);
    return kExitOk;
  }
  const ParamCircuit circuit = build_circuit_from(cfg);
  std::fputs(dump_circuit(circuit).c_str(), stdout);
  std::printf("ops: %zu\n", circuit.ops.size());
  std::printf("parameters: %d\n", circuit.num_params);
  std::printf("arch_digest: %s\n", circuit.digest_hex().c_str());
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Hybrid quantum-classical trainer for 4-class image classification"};
  app.set_config("--config", "", "Key-value config file (flags override it)");

  RunConfig cfg;
  if (const char* env = std::getenv("QCNN_DATA_DIR")) cfg.data_dir = env;

  int limit = -1;
  std::vector<int> classes = {0, 1, 2, 3};

  const auto add_common = [&](CLI::App* cmd) {
    cmd->fallthrough();  // top-level flags like --config work anywhere
    cmd->add_option("--model", cfg.model, "qcnn or baseline")
        ->check(CLI::IsMember({"qcnn", "baseline"}));
    cmd->add_option("--arch", cfg.arch, "full or reference")
        ->check(CLI::IsMember({"full", "reference"}));
    cmd->add_option("--entangler", cfg.entangler, "cry or cnot")
        ->check(CLI::IsMember({"cry", "cnot"}));
    cmd->add_option("--regular-layers", cfg.regular_layers, "Number of regular layers")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--unshared-sublayers", cfg.unshared_sublayers,
                  "Give each sublayer its own filter parameters");
    cmd->add_flag("--no-final-filter", cfg.no_final_filter,
                  "Drop the final filter (ablation)");
    cmd->add_flag("--no-output-cascade", cfg.no_output_cascade,
                  "Drop the Toffoli output cascade (ablation)");
    cmd->add_option("--seed", cfg.hyper.seed, "Seed for init and shuffling");
    cmd->add_option("--workers", cfg.workers, "Worker threads (0 = all cores)");
    cmd->add_option("--out", cfg.out_dir, "Output directory");
  };

  const auto add_data = [&](CLI::App* cmd) {
    cmd->add_option("--dataset", cfg.dataset, "mnist or fashion")
        ->check(CLI::IsMember({"mnist", "fashion"}));
    cmd->add_option("--data-dir", cfg.data_dir,
                    "Directory holding <dataset>/ IDX files")
        ->envname("QCNN_DATA_DIR");
    cmd->add_option("--images", cfg.images_path, "Training images IDX path");
    cmd->add_option("--labels", cfg.labels_path, "Training labels IDX path");
    cmd->add_option("--test-images", cfg.test_images_path, "Test images IDX path");
    cmd->add_option("--test-labels", cfg.test_labels_path, "Test labels IDX path");
    cmd->add_option("--classes", classes, "Four source labels, e.g. 3,4,5,6")
        ->delimiter(',')
        ->expected(4);
    cmd->add_option("--limit", limit, "Cap records per class");
  };

  CLI::App* train_cmd = app.add_subcommand("train", "Train a model");
  add_common(train_cmd);
  add_data(train_cmd);
  train_cmd->add_option("--epochs", cfg.hyper.epochs, "Training epochs");
  train_cmd->add_option("--lr", cfg.hyper.learning_rate, "Adam learning rate");
  train_cmd->add_option("--batch", cfg.hyper.batch_size, "Mini-batch size");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval_cmd);
  add_data(eval_cmd);
  eval_cmd->add_option("--checkpoint", cfg.checkpoint_path, "Checkpoint path");

  CLI::App* grad_cmd = app.add_subcommand("gradcheck",
                                          "Parameter-shift vs finite differences");
  add_common(grad_cmd);
  grad_cmd->add_option("--samples", cfg.gradcheck_samples, "Random samples to check");
  grad_cmd->add_flag("--corrupt-shift", cfg.corrupt_shift,
                     "Negative control: corrupt the shift gradient")
      ->group("");  // test hook, hidden from help

  CLI::App* inspect_cmd = app.add_subcommand("inspect", "Print the circuit");
  add_common(inspect_cmd);

  app.require_subcommand(1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (limit >= 0) cfg.limit_per_class = limit;
  std::copy_n(classes.begin(), 4, cfg.classes.begin());

  try {
    if (train_cmd->parsed()) {
      cfg.command = "train";
      return cmd_train(cfg);
    }
    if (eval_cmd->parsed()) {
      cfg.command = "eval";
      return cmd_eval(cfg);
    }
    if (grad_cmd->parsed()) {
      cfg.command = "gradcheck";
      return cmd_gradcheck(cfg);
    }
    cfg.command = "inspect";
    return cmd_inspect(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
}

}  // namespace qcnn
