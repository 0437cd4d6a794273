/* Copyright 2026 The segloss Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
// Command-line front end. Talks to the library only through segloss.h.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "segloss/segloss.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int exit_code_for(segloss_status status) {
  switch (status) {
    case SEGLOSS_OK:
      return 0;
    case SEGLOSS_ERR_INVALID_ARGUMENT:
    case SEGLOSS_ERR_CONFIG:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

int report_failure(segloss_status status) {
  std::cerr << "segloss: " << segloss_status_name(status) << ": "
            << segloss_last_error() << "\n";
  return exit_code_for(status);
}

struct ConfigDeleter {
  void operator()(segloss_config* c) const { segloss_config_free(c); }
};
using ConfigPtr = std::unique_ptr<segloss_config, ConfigDeleter>;

struct StringDeleter {
  void operator()(char* s) const { segloss_string_free(s); }
};
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Loads path, or the defaults when path is empty.
segloss_status open_config(const std::string& path, ConfigPtr& out) {
  segloss_config* raw = nullptr;
  const segloss_status st = path.empty() ? segloss_config_default(&raw)
                                         : segloss_config_load(path.c_str(), &raw);
  out.reset(raw);
  return st;
}

bool parse_size(const std::string& text, int& h, int& w, int& c) {
  char x1 = 0;
  char x2 = 0;
  std::istringstream in(text);
  if (!(in >> h >> x1 >> w >> x2 >> c)) return false;
  std::string rest;
  in >> rest;
  return x1 == 'x' && x2 == 'x' && rest.empty() && h > 0 && w > 0 && c > 1;
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              bool force) {
  ConfigPtr cfg;
  if (auto st = open_config(config_path, cfg); st != SEGLOSS_OK) return report_failure(st);
  char* summary = nullptr;
  const segloss_status st = segloss_train(
      cfg.get(), out_dir.empty() ? nullptr : out_dir.c_str(), force ? 1 : 0, &summary);
  StringPtr owned(summary);
  if (st != SEGLOSS_OK) return report_failure(st);
  std::cout << summary << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& config_path) {
  ConfigPtr cfg;
  if (!config_path.empty()) {
    if (auto st = open_config(config_path, cfg); st != SEGLOSS_OK) return report_failure(st);
  }
  char* report = nullptr;
  const segloss_status st = segloss_eval(checkpoint.c_str(), cfg.get(), &report);
  StringPtr owned(report);
  if (st != SEGLOSS_OK) return report_failure(st);
  std::cout << report << "\n";
  return 0;
}

int cmd_gradcheck(const std::string& loss, const std::string& size,
                  std::uint64_t seed, const std::string& config_path,
                  const std::vector<std::string>& overrides) {
  int h = 0, w = 0, c = 0;
  if (!parse_size(size, h, w, c)) {
    std::cerr << "segloss: --size must look like HxWxC with C >= 2, got '" << size << "'\n";
    return kExitUsage;
  }
  ConfigPtr cfg;
  if (auto st = open_config(config_path, cfg); st != SEGLOSS_OK) return report_failure(st);
  const std::string name_json = "\"" + loss + "\"";
  if (auto st = segloss_config_set(cfg.get(), "loss.name", name_json.c_str()); st != SEGLOSS_OK) {
    return report_failure(st);
  }
  for (std::size_t n = 0; n + 1 < overrides.size(); n += 2) {
    const auto st = segloss_config_set(cfg.get(), overrides[n].c_str(), overrides[n + 1].c_str());
    if (st != SEGLOSS_OK) return report_failure(st);
  }
  int passed = 0;
  char* report = nullptr;
  const segloss_status st =
      segloss_gradcheck(cfg.get(), h, w, c, seed, &passed, &report);
  StringPtr owned(report);
  if (st != SEGLOSS_OK) return report_failure(st);
  std::cout << report << "\n";
  return passed ? 0 : kExitRuntime;
}

int cmd_gen_data(const std::string& config_path, int count, const std::string& out_dir) {
  ConfigPtr cfg;
  if (auto st = open_config(config_path, cfg); st != SEGLOSS_OK) return report_failure(st);
  if (auto st = segloss_gen_data(cfg.get(), count, out_dir.c_str()); st != SEGLOSS_OK) {
    return report_failure(st);
  }
  return 0;
}

int cmd_k_sweep(const std::string& config_path, const std::vector<double>& ks,
                const std::string& out_dir, bool force) {
  ConfigPtr cfg;
  if (auto st = open_config(config_path, cfg); st != SEGLOSS_OK) return report_failure(st);
  char* csv = nullptr;
  const segloss_status st = segloss_k_sweep(cfg.get(), ks.data(), ks.size(),
                                            out_dir.c_str(), force ? 1 : 0, &csv);
  StringPtr owned(csv);
  if (st != SEGLOSS_OK) return report_failure(st);
  std::cout << csv;
  return 0;
}

int cmd_reference_config() {
  ConfigPtr cfg;
  if (auto st = open_config("", cfg); st != SEGLOSS_OK) return report_failure(st);
  char* text = nullptr;
  const segloss_status st = segloss_config_to_json(cfg.get(), &text);
  StringPtr owned(text);
  if (st != SEGLOSS_OK) return report_failure(st);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally adaptive segmentation loss: training, evaluation and "
               "gradient checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", segloss_version());

  std::string config_path;
  std::string out_dir;
  bool force = false;

  auto* train = app.add_subcommand("train", "Train a TinyNet from a config file");
  train->add_option("config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  train->add_flag("--force", force, "Replace an existing run directory");

  std::string checkpoint;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the held-out set");
  eval->add_option("checkpoint", checkpoint, "Checkpoint directory")->required();
  eval->add_option("--config", config_path, "Config whose scene/eval settings to use")
      ->check(CLI::ExistingFile);

  std::string loss;
  std::string size = "5x5x3";
  std::uint64_t seed = 7;
  std::vector<std::string> overrides;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of a loss gradient");
  grad->add_option("loss", loss, "adaptive | softmax_ce | focal | center")->required();
  grad->add_option("--size", size, "Instance size HxWxC")->capture_default_str();
  grad->add_option("--seed", seed, "Instance seed")->capture_default_str();
  grad->add_option("--config", config_path, "Config supplying loss hyperparameters")
      ->check(CLI::ExistingFile);
  grad->add_option("--set", overrides, "Override a config key: --set loss.k 5")
      ->expected(2)
      ->take_all();

  int count = 8;
  auto* gen = app.add_subcommand("gen-data", "Write synthetic samples");
  gen->add_option("--config", config_path, "Run config (defaults if omitted)")
      ->check(CLI::ExistingFile);
  gen->add_option("--count", count, "Number of samples")->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory")->required();

  std::vector<double> ks = {1, 2, 3, 5};
  auto* sweep = app.add_subcommand("k-sweep", "Adaptive-loss runs over Minkowski exponents");
  sweep->add_option("config", config_path, "Base run config")->required()->check(CLI::ExistingFile);
  sweep->add_option("--ks", ks, "Exponents to try")->delimiter(',')->capture_default_str();
  sweep->add_option("--out", out_dir, "Sweep directory")->required();
  sweep->add_flag("--force", force, "Replace existing run directories");

  auto* ref = app.add_subcommand("reference-config", "Print the default config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (train->parsed()) return cmd_train(config_path, out_dir, force);
  if (eval->parsed()) return cmd_eval(checkpoint, config_path);
  if (grad->parsed()) return cmd_gradcheck(loss, size, seed, config_path, overrides);
  if (gen->parsed()) return cmd_gen_data(config_path, count, out_dir);
  if (sweep->parsed()) return cmd_k_sweep(config_path, ks, out_dir, force);
  if (ref->parsed()) return cmd_reference_config();
  return kExitUsage;
}
