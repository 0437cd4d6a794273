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
#include "segloss/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "segloss/error.hpp"

namespace segloss {

Grid3 finite_difference_grad(const ScalarFn& fn, const Grid3& at, double h) {
  if (!(h > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "finite difference step must be > 0");
  }
  Grid3 probe = at;
  Grid3 grad(at.height(), at.width(), at.channels());
  auto x = probe.data();
  auto g = grad.data();
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double orig = x[k];
    x[k] = orig + h;
    const double up = fn(probe);
    x[k] = orig - h;
    const double down = fn(probe);
    x[k] = orig;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("non-finite loss while probing element " +
                         std::to_string(k));
    }
    g[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

GradCheckReport check_gradient(const Grid3& analytic, const Grid3& numeric,
                               double rel_tol, double abs_tol) {
  if (!analytic.same_shape(numeric)) {
    throw DimensionError("check_gradient: analytic and numeric shapes differ");
  }
  GradCheckReport r;
  r.rel_tol = rel_tol;
  r.abs_tol = abs_tol;
  r.num_checked = static_cast<int>(analytic.size());
  auto a = analytic.data();
  auto n = numeric.data();
  std::size_t worst = 0;
  bool have_rel_worst = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double abs_err = std::abs(a[k] - n[k]);
    const double scale = std::max(std::abs(a[k]), std::abs(n[k]));
    const double rel_err = scale > 0.0 ? abs_err / scale : 0.0;
    if (abs_err > r.max_abs_error) {
      r.max_abs_error = abs_err;
      if (!have_rel_worst) worst = k;
    }
    if (abs_err >= abs_tol) {
      if (rel_err >= rel_tol) r.passed = false;
      if (!have_rel_worst || rel_err > r.max_rel_error) {
        r.max_rel_error = rel_err;
        worst = k;
        have_rel_worst = true;
      }
    }
  }
  const std::size_t c = analytic.channels();
  const std::size_t w = analytic.width();
  r.worst_c = static_cast<int>(worst % c);
  r.worst_j = static_cast<int>((worst / c) % w);
  r.worst_i = static_cast<int>(worst / (c * w));
  return r;
}

std::string GradCheckReport::to_json() const {
  nlohmann::json j;
  j["max_rel_error"] = max_rel_error;
  j["max_abs_error"] = max_abs_error;
  j["worst_index"] = {worst_i, worst_j, worst_c};
  j["num_checked"] = num_checked;
  j["passed"] = passed;
  j["rel_tol"] = rel_tol;
  j["abs_tol"] = abs_tol;
  return j.dump();
}

}  // namespace segloss
