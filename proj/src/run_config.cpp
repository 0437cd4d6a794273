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
#include "segloss/run_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "segloss/error.hpp"

namespace segloss {
namespace {

using nlohmann::json;

// Reads typed values out of one JSON object and tracks which keys were
// consumed so leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& root, std::string name) : name_(std::move(name)) {
    if (root.contains(name_)) {
      obj_ = root.at(name_);
      if (!obj_.is_object()) throw ConfigError(name_, "must be an object");
    } else {
      obj_ = json::object();
    }
  }
  explicit Section(json obj) : obj_(std::move(obj)) {
    if (!obj_.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  }

  std::string field(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }
  bool has(const std::string& key) const { return obj_.contains(key); }
  void mark_seen(const std::string& key) { seen_.insert(key); }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(field(key), "expected a boolean");
        out = v.get<bool>();
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) {
            out = v.get<T>();
          } else {
            throw ConfigError(field(key), "expected a non-negative integer");
          }
        } else {
          const auto wide = v.get<std::int64_t>();
          if (wide < std::numeric_limits<T>::min() || wide > std::numeric_limits<T>::max()) {
            throw ConfigError(field(key), "integer out of range");
          }
          out = static_cast<T>(wide);
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(field(key), "expected a number");
        out = v.get<T>();
      } else {
        if (!v.is_string()) throw ConfigError(field(key), "expected a string");
        out = v.get<T>();
      }
    } catch (const json::exception& e) {
      throw ConfigError(field(key), e.what());
    }
  }

  // Keys that are present but only meaningful for other losses.
  void forbid(const std::string& key, const std::string& why) const {
    if (obj_.contains(key)) throw ConfigError(field(key), why);
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

  const json& raw() const { return obj_; }

 private:
  std::string name_;
  json obj_;
  std::set<std::string> seen_;
};

WeightSchedule parse_schedule(const std::string& s) {
  if (s == "chessboard") return WeightSchedule::kChessboardPow2;
  if (s == "uniform") return WeightSchedule::kUniform;
  throw ConfigError("loss.weight_schedule",
                    "expected \"chessboard\" or \"uniform\", got \"" + s + "\"");
}

void read_loss(const json& root, LossSettings& loss) {
  Section s(root, "loss");
  std::string name = loss_kind_name(loss.kind);
  s.read("name", name);
  loss.kind = parse_loss_kind(name);
  const std::string why = "not used by loss '" + name + "'";
  switch (loss.kind) {
    case LossKind::kAdaptive: {
      s.read("k", loss.k);
      s.read("window", loss.window);
      s.read("stride", loss.stride);
      std::string schedule = schedule_name(loss.schedule);
      s.read("weight_schedule", schedule);
      loss.schedule = parse_schedule(schedule);
      s.read("normalize", loss.normalize);
      for (const char* k : {"alpha", "gamma", "lambda"}) s.forbid(k, why);
      break;
    }
    case LossKind::kFocal:
      s.read("alpha", loss.focal_alpha);
      s.read("gamma", loss.focal_gamma);
      for (const char* k : {"k", "window", "stride", "weight_schedule", "normalize", "lambda"}) {
        s.forbid(k, why);
      }
      break;
    case LossKind::kCenter:
      s.read("alpha", loss.center_alpha);
      s.read("lambda", loss.center_lambda);
      for (const char* k : {"k", "window", "stride", "weight_schedule", "normalize", "gamma"}) {
        s.forbid(k, why);
      }
      break;
    case LossKind::kSoftmaxCe:
      for (const char* k : {"k", "window", "stride", "weight_schedule", "normalize",
                            "alpha", "gamma", "lambda"}) {
        s.forbid(k, why);
      }
      break;
  }
  s.reject_unknown();
}

void read_scene(const json& root, SceneSpec& scene) {
  Section s(root, "scene");
  s.read("height", scene.height);
  s.read("width", scene.width);
  s.read("classes", scene.classes);
  s.read("num_shapes", scene.num_shapes);
  s.read("skew", scene.class_frequency_skew);
  s.read("noise_std", scene.noise_std);
  if (s.has("shape_kinds")) {
    const json& kinds = s.raw().at("shape_kinds");
    if (!kinds.is_array()) throw ConfigError("scene.shape_kinds", "expected an array");
    unsigned mask = 0;
    for (const json& k : kinds) {
      if (k == "rectangle") {
        mask |= static_cast<unsigned>(ShapeKind::kRectangle);
      } else if (k == "disk") {
        mask |= static_cast<unsigned>(ShapeKind::kDisk);
      } else {
        throw ConfigError("scene.shape_kinds", "unknown shape " + k.dump());
      }
    }
    scene.shape_kinds = mask;
  }
  s.mark_seen("shape_kinds");
  s.reject_unknown();
}

void read_trainer(const json& root, TrainerSettings& t) {
  Section s(root, "trainer");
  s.read("lr", t.lr);
  s.read("momentum", t.momentum);
  s.read("decay_rate", t.decay_rate);
  s.read("decay_interval", t.decay_interval);
  s.read("iterations", t.iterations);
  s.read("eval_interval", t.eval_interval);
  s.read("log_interval", t.log_interval);
  s.read("batch_size", t.batch_size);
  s.read("augment", t.augment);
  s.read("hidden_channels", t.hidden_channels);
  s.reject_unknown();
}

void read_eval(const json& root, EvalSettings& e) {
  Section s(root, "eval");
  s.read("seed", e.seed);
  s.read("count", e.count);
  s.read("mask_count", e.mask_count);
  s.reject_unknown();
}

RunConfig from_json(const json& root) {
  Section top(root);
  RunConfig cfg;
  top.read("seed", cfg.seed);
  top.read("output_dir", cfg.output_dir);
  read_loss(root, cfg.loss);
  read_scene(root, cfg.scene);
  read_trainer(root, cfg.trainer);
  read_eval(root, cfg.eval);
  for (const char* k : {"loss", "scene", "trainer", "eval"}) top.mark_seen(k);
  top.reject_unknown();
  cfg.validate();
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  json loss;
  loss["name"] = loss_kind_name(cfg.loss.kind);
  switch (cfg.loss.kind) {
    case LossKind::kAdaptive:
      loss["k"] = cfg.loss.k;
      loss["window"] = cfg.loss.window;
      loss["stride"] = cfg.loss.stride;
      loss["weight_schedule"] = schedule_name(cfg.loss.schedule);
      loss["normalize"] = cfg.loss.normalize;
      break;
    case LossKind::kFocal:
      loss["alpha"] = cfg.loss.focal_alpha;
      loss["gamma"] = cfg.loss.focal_gamma;
      break;
    case LossKind::kCenter:
      loss["alpha"] = cfg.loss.center_alpha;
      loss["lambda"] = cfg.loss.center_lambda;
      break;
    case LossKind::kSoftmaxCe:
      break;
  }
  j["loss"] = loss;
  json scene;
  scene["height"] = cfg.scene.height;
  scene["width"] = cfg.scene.width;
  scene["classes"] = cfg.scene.classes;
  scene["num_shapes"] = cfg.scene.num_shapes;
  json kinds = json::array();
  if (cfg.scene.allows(ShapeKind::kRectangle)) kinds.push_back("rectangle");
  if (cfg.scene.allows(ShapeKind::kDisk)) kinds.push_back("disk");
  scene["shape_kinds"] = kinds;
  scene["skew"] = cfg.scene.class_frequency_skew;
  scene["noise_std"] = cfg.scene.noise_std;
  j["scene"] = scene;
  const TrainerSettings& t = cfg.trainer;
  j["trainer"] = {{"lr", t.lr},
                  {"momentum", t.momentum},
                  {"decay_rate", t.decay_rate},
                  {"decay_interval", t.decay_interval},
                  {"iterations", t.iterations},
                  {"eval_interval", t.eval_interval},
                  {"log_interval", t.log_interval},
                  {"batch_size", t.batch_size},
                  {"augment", t.augment},
                  {"hidden_channels", t.hidden_channels}};
  j["eval"] = {{"seed", cfg.eval.seed},
               {"count", cfg.eval.count},
               {"mask_count", cfg.eval.mask_count}};
  return j;
}

json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(what, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

const char* schedule_name(WeightSchedule schedule) {
  return schedule == WeightSchedule::kUniform ? "uniform" : "chessboard";
}

void RunConfig::validate() const {
  if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (loss.kind == LossKind::kAdaptive) {
    if (loss.window <= 0 || loss.window % 2 == 0) {
      throw ConfigError("loss.window", "must be an odd positive integer, got " +
                                           std::to_string(loss.window));
    }
    if (loss.stride < 1) throw ConfigError("loss.stride", "must be >= 1");
    if (!(loss.k >= 1.0) || !std::isfinite(loss.k)) {
      throw ConfigError("loss.k", "must be finite and >= 1");
    }
  }
  if (loss.kind == LossKind::kFocal) {
    if (!(loss.focal_alpha > 0.0 && loss.focal_alpha <= 1.0)) {
      throw ConfigError("loss.alpha", "must lie in (0, 1]");
    }
    if (!(loss.focal_gamma >= 0.0) || !std::isfinite(loss.focal_gamma)) {
      throw ConfigError("loss.gamma", "must be finite and >= 0");
    }
  }
  if (loss.kind == LossKind::kCenter) {
    if (!(loss.center_alpha > 0.0 && loss.center_alpha <= 1.0)) {
      throw ConfigError("loss.alpha", "must lie in (0, 1]");
    }
    if (!(loss.center_lambda >= 0.0) || !std::isfinite(loss.center_lambda)) {
      throw ConfigError("loss.lambda", "must be finite and >= 0");
    }
  }
  try {
    scene.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("scene." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  if (!(trainer.lr > 0.0) || !std::isfinite(trainer.lr)) {
    throw ConfigError("trainer.lr", "must be finite and > 0");
  }
  if (!(trainer.momentum >= 0.0 && trainer.momentum < 1.0)) {
    throw ConfigError("trainer.momentum", "must lie in [0, 1)");
  }
  if (!(trainer.decay_rate > 0.0 && trainer.decay_rate <= 1.0)) {
    throw ConfigError("trainer.decay_rate", "must lie in (0, 1]");
  }
  if (trainer.decay_interval < 0) throw ConfigError("trainer.decay_interval", "must be >= 0");
  if (trainer.iterations < 0) throw ConfigError("trainer.iterations", "must be >= 0");
  if (trainer.eval_interval < 1) throw ConfigError("trainer.eval_interval", "must be >= 1");
  if (trainer.log_interval < 1) throw ConfigError("trainer.log_interval", "must be >= 1");
  if (trainer.batch_size < 1) throw ConfigError("trainer.batch_size", "must be >= 1");
  if (trainer.hidden_channels < 1) throw ConfigError("trainer.hidden_channels", "must be >= 1");
  if (eval.count < 1) throw ConfigError("eval.count", "must be >= 1");
  if (eval.mask_count < 0 || eval.mask_count > eval.count) {
    throw ConfigError("eval.mask_count", "must lie in [0, eval.count]");
  }
}

RunConfig parse_run_config(const std::string& text) {
  return from_json(parse_json_text(text, "<config>"));
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string serialize_run_config(const RunConfig& cfg) {
  return to_json(cfg).dump(2) + "\n";
}

void set_config_value(RunConfig& cfg, const std::string& dotted_key,
                      const std::string& json_value) {
  json root = to_json(cfg);
  json value = parse_json_text(json_value, dotted_key);
  json::json_pointer ptr("/" + [&] {
    std::string p = dotted_key;
    for (char& ch : p) if (ch == '.') ch = '/';
    return p;
  }());
  // Switching the loss drops hyperparameters of the previous loss.
  if (dotted_key == "loss.name") root["loss"] = json::object();
  root[ptr] = value;
  cfg = from_json(root);
}

AdaptiveLossConfig adaptive_config(const RunConfig& cfg) {
  AdaptiveLossConfig a;
  a.filter.window = cfg.loss.window;
  a.filter.stride = cfg.loss.stride;
  a.filter.classes = cfg.scene.classes;
  a.filter.schedule = cfg.loss.schedule;
  a.k = cfg.loss.k;
  a.normalize_inputs = cfg.loss.normalize;
  return a;
}

std::unique_ptr<SegmentationLoss> make_loss(const RunConfig& cfg) {
  switch (cfg.loss.kind) {
    case LossKind::kAdaptive:
      return make_adaptive_loss(adaptive_config(cfg));
    case LossKind::kSoftmaxCe:
      return make_softmax_ce_loss();
    case LossKind::kFocal:
      return make_focal_loss(FocalConfig{cfg.loss.focal_alpha, cfg.loss.focal_gamma});
    case LossKind::kCenter:
      return std::make_unique<CenterLoss>(CenterLossConfig::with_zero_centers(
          cfg.scene.classes, cfg.loss.center_alpha, cfg.loss.center_lambda));
  }
  throw ConfigError("loss.name", "unsupported loss");
}

}  // namespace segloss
