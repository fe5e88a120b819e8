#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "thermalscatter/constants.hpp"
#include "thermalscatter/perturbation.hpp"

namespace c = ts::constants;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Constants, EstimatesReproduceTheFrozenValues) {
  const auto rep = c::estimate_constants();
  EXPECT_NEAR(rep.m, c::frozen::m, 1e-10 * c::frozen::m);
  EXPECT_NEAR(rep.c_m, c::frozen::c_m, 1e-10 * c::frozen::c_m);
  EXPECT_NEAR(rep.c_n, c::frozen::c_n, 1e-10 * c::frozen::c_n);
  EXPECT_NEAR(rep.c_hat, c::frozen::c_hat, 1e-10 * c::frozen::c_hat);
  EXPECT_NEAR(rep.k_hat, c::frozen::k_hat, 1e-10 * c::frozen::k_hat);
}

TEST(Constants, LimitsAndDerivedRelations) {
  const auto rep = c::estimate_constants();
  EXPECT_NEAR(rep.m_limit, std::sqrt(2.0 / pi), 1e-15);
  EXPECT_NEAR(rep.cm_limit, 1.0 / (2.0 * pi), 1e-15);
  EXPECT_NEAR(rep.cn_limit, pi / 2.0, 1e-15);
  // Suprema dominate their limits and exceed them only by the safety margin.
  EXPECT_GE(rep.m, rep.m_limit);
  EXPECT_LE(rep.m, rep.m_limit * (1.0 + 2.0 * c::margin));
  EXPECT_GT(rep.c_m, rep.cm_limit);
  EXPECT_GE(rep.c_n, rep.cn_limit);
  EXPECT_DOUBLE_EQ(rep.c_hat, c::c_hat_from_m(rep.m));
  EXPECT_DOUBLE_EQ(rep.k_hat, c::k_hat_from_m(rep.m));
  EXPECT_NEAR(c::c_hat_from_m(1.0), std::sqrt(2.0) * pi, 1e-15);
  EXPECT_NEAR(c::k_hat_from_m(1.0), std::pow(2.0, 1.25) * std::sqrt(pi) * std::pow(3.0, -0.375), 1e-15);
}

TEST(Constants, ConstantCIsStableUnderResolution) {
  const double a = ts::estimate_constant_C(1000);
  const double b = ts::estimate_constant_C(4000);
  EXPECT_NEAR(a, b, 1e-6 * b);
  EXPECT_NEAR(b, c::frozen::c_hat, 1e-6 * b);
}

TEST(Constants, MaximizeFindsAnInteriorPeak) {
  const auto m = c::maximize([](double x) { return x * std::exp(-x); }, 1e-3, 1e3, 500);
  EXPECT_NEAR(m.argmax, 1.0, 1e-6);
  EXPECT_NEAR(m.value, std::exp(-1.0), 1e-14);
}
