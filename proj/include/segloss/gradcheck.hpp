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
#ifndef SEGLOSS_GRADCHECK_HPP_
#define SEGLOSS_GRADCHECK_HPP_

#include <functional>
#include <string>

#include "segloss/grid.hpp"

namespace segloss {

using ScalarFn = std::function<double(const Grid3&)>;

// Central differences (f(x + h e) - f(x - h e)) / 2h for every element.
// Throws NumericError naming the probe index if f returns a non-finite value.
Grid3 finite_difference_grad(const ScalarFn& fn, const Grid3& at, double h = 1e-6);

struct GradCheckReport {
  // Largest relative error among elements whose absolute error is not
  // within abs_tol; 0 when every element passes on the absolute rule.
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  // Element with the largest relative error under the same rule, or the
  // largest absolute error if none.
  int worst_i = 0;
  int worst_j = 0;
  int worst_c = 0;
  int num_checked = 0;
  bool passed = true;
  double rel_tol = 0.0;
  double abs_tol = 0.0;

  std::string to_json() const;
};

// Element-wise comparison: an element passes when its relative error
// |a - n| / max(|a|, |n|) is below rel_tol or its absolute error is below
// abs_tol. Symmetric in its two grid arguments.
GradCheckReport check_gradient(const Grid3& analytic, const Grid3& numeric,
                               double rel_tol = 1e-5, double abs_tol = 1e-8);

}  // namespace segloss

#endif  // SEGLOSS_GRADCHECK_HPP_
