#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "thermalscatter/error.hpp"
#include "thermalscatter/grid.hpp"
#include "thermalscatter/io.hpp"

using namespace ts;

TEST(Grid, GaussLegendreIntegratesPolynomialsExactly) {
  const auto rule = gauss_legendre(12);
  for (int p = 0; p <= 23; ++p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], p);
    const double want = p % 2 ? 0.0 : 2.0 / (p + 1);
    EXPECT_NEAR(sum, want, 1e-14) << p;
  }
}

TEST(Grid, WeightsSumToTheInterval) {
  for (double g : {1.0, 2.0, 3.0}) {
    const auto grid = build_grid(17.5, 96, g);
    double sum = 0.0;
    for (double w : grid->weights()) sum += w;
    EXPECT_NEAR(sum, 35.0, 1e-11) << g;
  }
}

TEST(Grid, NodesAreMirroredAndAvoidZero) {
  const auto grid = build_grid(20.0, 64, 2.0);
  ASSERT_EQ(grid->size(), 128u);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    EXPECT_EQ(grid->node(k), -grid->node(grid->mirror(k)));
    EXPECT_EQ(grid->weight(k), grid->weight(grid->mirror(k)));
    EXPECT_NE(grid->node(k), 0.0);
    if (k > 0) EXPECT_LT(grid->node(k - 1), grid->node(k));
  }
  for (int i = 0; i < 64; ++i) {
    EXPECT_EQ(grid->node(grid->positive_index(i)), grid->half_nodes()[static_cast<std::size_t>(i)]);
    EXPECT_EQ(grid->node(grid->negative_index(i)), -grid->half_nodes()[static_cast<std::size_t>(i)]);
  }
  EXPECT_LT(grid->half_nodes().back(), 20.0);
}

TEST(Grid, RefinementConvergesAtHighOrder) {
  // int_{-c}^{c} |x|^{-1/2} e^{-x^2} dx = Gamma(1/4) up to a tail below 1e-40 for c = 10.
  const double want = std::tgamma(0.25);
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const auto grid = build_grid(10.0, n, 2.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i)
      sum += grid->weight(i) * std::exp(-grid->node(i) * grid->node(i)) / std::sqrt(std::abs(grid->node(i)));
    const double err = std::abs(sum - want);
    if (prev > 0.0 && prev > 1e-13) EXPECT_LT(err, prev / 16.0) << n;
    prev = err;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(Grid, DegenerateParametersAreRejected) {
  EXPECT_THROW(build_grid(0.0, 10), ContractError);
  EXPECT_THROW(build_grid(-1.0, 10), ContractError);
  EXPECT_THROW(build_grid(10.0, 0), ContractError);
  EXPECT_THROW(build_grid(10.0, 10, 0.5), ContractError);
  EXPECT_THROW(build_grid(std::nan(""), 10), ContractError);
}

TEST(Grid, NormsAndInnerProducts) {
  const auto grid = build_grid(15.0, 64);
  const auto f = SampledFunction::sample(grid, [](double x) { return cplx(std::exp(-x * x / 2.0), 0.0); });
  const auto g = SampledFunction::sample(grid, [](double x) { return cplx(0.0, x * std::exp(-x * x / 2.0)); });
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  EXPECT_NEAR(norm_l2(f), std::sqrt(sqrt_pi), 1e-10);
  EXPECT_NEAR(norm_l1(f), std::sqrt(2.0) * sqrt_pi, 1e-10);
  EXPECT_DOUBLE_EQ(norm_linf(f), std::abs(f[grid->positive_index(0)]));
  EXPECT_NEAR(std::abs(inner(f, g)), 0.0, 1e-12);
  const auto h = 2.0 * f - f;
  EXPECT_NEAR(norm_l2(h - f), 0.0, 1e-15);
  const auto m = multiply(f, [](double x) { return x; });
  EXPECT_NEAR(std::abs(inner(g, cplx(0.0, 1.0) * m) - cplx(norm_l2(m) * norm_l2(m), 0.0)), 0.0, 1e-12);
}

TEST(Grid, MixingGridsIsAContractViolation) {
  const auto a = build_grid(15.0, 32);
  const auto b = build_grid(15.0, 32);
  const auto c = build_grid(16.0, 32);
  const SampledFunction fa(a), fb(b), fc(c);
  EXPECT_NO_THROW(inner(fa, fb));
  EXPECT_TRUE(a->same_layout(*b));
  EXPECT_THROW(inner(fa, fc), ContractError);
  EXPECT_THROW(fa + fc, ContractError);
  EXPECT_THROW(SampledFunction(a, Eigen::VectorXcd::Zero(3)), ContractError);
}

TEST(Grid, CsvRoundTripIsExact) {
  const auto grid = build_grid(12.0, 24);
  const auto f = SampledFunction::sample(grid, [](double x) { return cplx(std::sin(x) / 3.0, std::exp(-x) * 1e-7); });
  std::stringstream buf;
  write_csv(buf, f);
  const auto g = read_csv(buf, grid);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(f[i], g[i]);

  std::stringstream wrong;
  write_csv(wrong, f);
  EXPECT_THROW(read_csv(wrong, build_grid(12.5, 24)), ContractError);
  std::stringstream bad_header("a,b,c,d\n");
  EXPECT_THROW(read_csv(bad_header, grid), ContractError);
}

TEST(Grid, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
}
