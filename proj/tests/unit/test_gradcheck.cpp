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

#include <cmath>
#include <limits>

#include "segloss/error.hpp"
#include "segloss/gradcheck.hpp"
#include "test_helpers.hpp"

namespace segloss {
namespace {

using segloss::testing::random_grid;

double sum_squares(const Grid3& g) {
  double s = 0;
  for (double v : g.data()) s += v * v;
  return s;
}

TEST(FiniteDifference, SumOfSquares) {
  const Grid3 x = random_grid(2, 3, 2, 4);
  const Grid3 fd = finite_difference_grad(sum_squares, x);
  for (std::size_t k = 0; k < x.size(); ++k)
    EXPECT_NEAR(fd.data()[k], 2.0 * x.data()[k], 1e-8);
}

TEST(FiniteDifference, ErrorShrinksQuadratically) {
  const Grid3 x(1, 1, 1, {0.7});
  const auto expf = [](const Grid3& g) { return std::exp(g.data()[0]); };
  const double exact = std::exp(0.7);
  const double e1 = std::abs(finite_difference_grad(expf, x, 1e-2).data()[0] - exact);
  const double e2 = std::abs(finite_difference_grad(expf, x, 1e-3).data()[0] - exact);
  // central difference error ~ h^2 * f'''/6
  EXPECT_GT(e1 / e2, 80.0);
  EXPECT_LT(e1 / e2, 120.0);
}

TEST(FiniteDifference, NonFiniteValueNamesProbe) {
  const Grid3 x(1, 2, 1, {0.0, 1.0});
  const auto bad = [](const Grid3& g) {
    return g.data()[1] > 1.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  try {
    finite_difference_grad(bad, x);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
  }
}

TEST(FiniteDifference, ConstantFunctionHasZeroGradient) {
  const Grid3 x = random_grid(2, 2, 3, 6);
  const Grid3 fd = finite_difference_grad([](const Grid3&) { return 4.2; }, x);
  for (double v : fd.data()) EXPECT_EQ(v, 0.0);
}

TEST(CheckGradient, IdenticalGrids) {
  const Grid3 a = random_grid(3, 3, 3, 7);
  const GradCheckReport r = check_gradient(a, a);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.max_rel_error, 0.0);
  EXPECT_EQ(r.max_abs_error, 0.0);
}

TEST(CheckGradient, OffByOneThousandthFails) {
  Grid3 numeric = random_grid(3, 3, 2, 8);
  numeric(2, 1, 1) = 1.0;
  Grid3 analytic = numeric;
  analytic(2, 1, 1) += 1e-3;
  const GradCheckReport r = check_gradient(analytic, numeric, 1e-5, 1e-8);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.worst_i, 2);
  EXPECT_EQ(r.worst_j, 1);
  EXPECT_EQ(r.worst_c, 1);
}

TEST(CheckGradient, PassesOnAgreement) {
  const Grid3 x = random_grid(3, 3, 2, 5);
  Grid3 analytic = x;
  for (double& v : analytic.data()) v *= 2.0;
  const GradCheckReport r =
      check_gradient(analytic, finite_difference_grad(sum_squares, x));
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.num_checked, 18);
  EXPECT_LT(r.max_rel_error, 1e-5);
}

TEST(CheckGradient, FlagsConstructedError) {
  Grid3 a(2, 2, 1, {1.0, 2.0, 3.0, 4.0});
  Grid3 n = a;
  n(1, 0, 0) = 3.1;
  const GradCheckReport r = check_gradient(a, n);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.worst_i, 1);
  EXPECT_EQ(r.worst_j, 0);
  EXPECT_NEAR(r.max_rel_error, 0.1 / 3.1, 1e-12);
  EXPECT_NE(r.to_json().find("max_rel_error"), std::string::npos);
}

TEST(CheckGradient, TinyAbsoluteErrorsPass) {
  const Grid3 a(1, 1, 2, {1e-12, 0.0});
  const Grid3 n(1, 1, 2, {-1e-12, 5e-9});
  EXPECT_TRUE(check_gradient(a, n).passed);
}

TEST(CheckGradient, Symmetric) {
  const Grid3 a = random_grid(3, 2, 2, 1), b = random_grid(3, 2, 2, 2);
  const GradCheckReport ab = check_gradient(a, b), ba = check_gradient(b, a);
  EXPECT_EQ(ab.max_rel_error, ba.max_rel_error);
  EXPECT_EQ(ab.max_abs_error, ba.max_abs_error);
  EXPECT_EQ(ab.passed, ba.passed);
}

TEST(CheckGradient, ShapeMismatchThrows) {
  EXPECT_THROW(check_gradient(Grid3(1, 1, 2), Grid3(1, 2, 1)), DimensionError);
}

}  // namespace
}  // namespace segloss
