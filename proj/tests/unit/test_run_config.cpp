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
#include <gtest/gtest.h>

#include "segloss/error.hpp"
#include "segloss/run_config.hpp"

namespace segloss {
namespace {

std::string field_of(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

TEST(RunConfig, DefaultsValidate) {
  const RunConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.loss.kind, LossKind::kAdaptive);
  EXPECT_EQ(cfg.loss.window, 5);
  EXPECT_EQ(cfg.loss.k, 3.0);
  EXPECT_EQ(cfg.trainer.momentum, 0.9);
  EXPECT_EQ(cfg.trainer.decay_rate, 0.9);
}

TEST(RunConfig, EmptyObjectGivesDefaults) {
  const RunConfig cfg = parse_run_config("{}");
  EXPECT_EQ(serialize_run_config(cfg), serialize_run_config(RunConfig{}));
}

TEST(RunConfig, RoundTripIsIdentity) {
  for (const char* loss :
       {R"({"name":"adaptive","k":2.0,"window":7,"stride":2,"weight_schedule":"uniform","normalize":false})",
        R"({"name":"softmax_ce"})", R"({"name":"focal","alpha":0.5,"gamma":1.5})",
        R"({"name":"center","alpha":0.3,"lambda":0.01})"}) {
    const std::string text = std::string(R"({"seed": 42, "output_dir": "x/y", "loss": )") +
                             loss +
                             R"(, "scene": {"classes": 4, "skew": 0.0, "shape_kinds": ["disk"]},
                                "trainer": {"lr": 0.01, "iterations": 7, "batch_size": 2}})";
    const RunConfig a = parse_run_config(text);
    const std::string s1 = serialize_run_config(a);
    const RunConfig b = parse_run_config(s1);
    EXPECT_EQ(serialize_run_config(b), s1);
    EXPECT_EQ(b.seed, 42u);
    EXPECT_EQ(b.scene.classes, 4);
    EXPECT_FALSE(b.scene.allows(ShapeKind::kRectangle));
    EXPECT_EQ(b.trainer.batch_size, 2);
  }
}

TEST(RunConfig, EvenWindowNamesField) {
  EXPECT_EQ(field_of(R"({"loss": {"name": "adaptive", "window": 4}})"), "loss.window");
}

TEST(RunConfig, ErrorsNameTheirFields) {
  EXPECT_EQ(field_of(R"({"loss": {"name": "adaptive", "k": 0.5}})"), "loss.k");
  EXPECT_EQ(field_of(R"({"loss": {"name": "focal", "k": 3}})"), "loss.k");
  EXPECT_EQ(field_of(R"({"loss": {"name": "softmax_ce", "gamma": 2}})"), "loss.gamma");
  EXPECT_EQ(field_of(R"({"loss": {"name": "hinge"}})"), "loss.name");
  EXPECT_EQ(field_of(R"({"scene": {"classes": 1}})"), "scene.classes");
  EXPECT_EQ(field_of(R"({"trainer": {"lr": -1}})"), "trainer.lr");
  EXPECT_EQ(field_of(R"({"trainer": {"iterations": "many"}})"), "trainer.iterations");
  EXPECT_EQ(field_of(R"({"bogus": 1})"), "bogus");
  EXPECT_EQ(field_of(R"({"scene": {"colour": 1}})"), "scene.colour");
}

TEST(RunConfig, MalformedJsonIsConfigError) {
  EXPECT_THROW(parse_run_config("{"), ConfigError);
  EXPECT_THROW(parse_run_config("[1]"), ConfigError);
}

TEST(RunConfig, SetValueOverrides) {
  RunConfig cfg;
  set_config_value(cfg, "loss.k", "5");
  EXPECT_EQ(cfg.loss.k, 5.0);
  set_config_value(cfg, "trainer.iterations", "12");
  EXPECT_EQ(cfg.trainer.iterations, 12);
  set_config_value(cfg, "loss.name", "\"focal\"");
  EXPECT_EQ(cfg.loss.kind, LossKind::kFocal);
  EXPECT_EQ(cfg.loss.focal_gamma, 2.0);
  EXPECT_THROW(set_config_value(cfg, "loss.window", "3"), ConfigError);
  EXPECT_THROW(set_config_value(cfg, "loss.gamma", "nope"), ConfigError);
}

TEST(RunConfig, BuildsMatchingLoss) {
  RunConfig cfg;
  EXPECT_EQ(make_loss(cfg)->kind(), LossKind::kAdaptive);
  const AdaptiveLossConfig a = adaptive_config(cfg);
  EXPECT_EQ(a.filter.window, 5);
  EXPECT_EQ(a.filter.classes, cfg.scene.classes);
  cfg.loss.kind = LossKind::kCenter;
  EXPECT_EQ(make_loss(cfg)->kind(), LossKind::kCenter);
}

}  // namespace
}  // namespace segloss
