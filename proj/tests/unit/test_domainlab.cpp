#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "thermalscatter/constants.hpp"
#include "thermalscatter/domainlab.hpp"
#include "thermalscatter/error.hpp"
#include "thermalscatter/operators.hpp"

using namespace ts;

namespace {

constexpr double pi = std::numbers::pi;

GridPtr grid() {
  static const GridPtr g = build_grid(40.0, 512);
  return g;
}

void expect_all_bounds_hold(const DomainSample& s) {
  EXPECT_GE(check_l1(s), -domain_slack) << s.seed;
  const auto linf = check_linf(s);
  EXPECT_GE(linf.margin, -domain_slack) << s.seed;
  EXPECT_GE(linf.weak_margin, -domain_slack) << s.seed;
  for (double k : {0.0, 0.5, 0.9}) {
    const auto h = check_holder(s, k, 200, s.seed);
    EXPECT_EQ(h.pairs, 200);
    EXPECT_LE(h.worst_ratio, h.constants.g_k) << s.seed << " k=" << k;
  }
  EXPECT_LE(check_decay(s), constants::frozen::k_hat) << s.seed;
}

}  // namespace

TEST(DomainLab, HolderConstantsMatchHighPrecision) {
  using oracle::real;
  for (double k = 0.0; k < 0.95; k += 0.1) {
    const real kk(k);
    const real c = 2 / sqrt(oracle::pi()) * boost::math::tgamma((kk + 1) / 2) / boost::math::tgamma((kk + 2) / 2);
    const real i = 2 / (pow(1 + kk, (1 + kk) / 2) * pow(1 - kk, (1 - kk) / 2));
    const real g = c * c * i * oracle::pi() / cos(kk * oracle::pi() / 2);
    const auto h = holder_constants(k);
    EXPECT_NEAR(h.c_k, static_cast<double>(c), 1e-10 * static_cast<double>(c)) << k;
    EXPECT_NEAR(h.i_k, static_cast<double>(i), 1e-10 * static_cast<double>(i)) << k;
    EXPECT_NEAR(h.g_k, static_cast<double>(g), 1e-10 * static_cast<double>(g)) << k;
  }
  EXPECT_NEAR(holder_constants(0.0).g_k, 8.0 * pi, 1e-12);
  EXPECT_THROW(holder_constants(1.0), DomainError);
  EXPECT_THROW(holder_constants(-0.1), DomainError);
}

TEST(DomainLab, QkIdentityWithAnalyticTail) {
  // int_{|s| < L} |s|^k / (s^2 + v^2) ds on the grid, plus the tail
  // 2 int_L^inf s^{k-2} (1 - v^2/s^2 + v^4/s^4) ds.
  const double big_l = grid()->cutoff();
  for (double k : {0.0, 0.3, 0.6, 0.9})
    for (double v : {0.5, 1.0, 3.0}) {
      double sum = 0.0;
      for (std::size_t i = 0; i < grid()->size(); ++i) {
        const double s = grid()->node(i);
        sum += grid()->weight(i) * std::pow(std::abs(s), k) / (s * s + v * v);
      }
      const double tail = 2.0 * (std::pow(big_l, k - 1.0) / (1.0 - k) - v * v * std::pow(big_l, k - 3.0) / (3.0 - k) +
                                 std::pow(v, 4) * std::pow(big_l, k - 5.0) / (5.0 - k));
      const double want = q_k(k, v);
      EXPECT_NEAR(sum + tail, want, 1e-4 * want) << k << " " << v;
    }
  EXPECT_NEAR(q_k(0.0, 2.0), pi / 2.0, 1e-15);
}

TEST(DomainLab, SamplesAreDeterministicPerSeed) {
  const auto a = make_domain_sample(grid(), 17);
  const auto b = make_domain_sample(grid(), 17);
  const auto c = make_domain_sample(grid(), 18);
  EXPECT_EQ(a.phi.values(), b.phi.values());
  EXPECT_EQ(a.psi.values(), b.psi.values());
  EXPECT_NE(a.phi.values(), c.phi.values());
}

TEST(DomainLab, RngIsReproducibleAndWellBehaved) {
  SampleRng a(3), b(3);
  double mean = 0.0, var = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = a.normal();
    b.normal();
    mean += z;
    var += z * z;
    const int k = a.integer(1, 5);
    b.integer(1, 5);
    ASSERT_GE(k, 1);
    ASSERT_LE(k, 5);
  }
  EXPECT_NEAR(mean / n, 0.0, 2e-2);
  EXPECT_NEAR(var / n, 1.0, 2e-2);
}

TEST(DomainLab, TPsiAgreesWithTheOperator) {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const auto s = make_domain_sample(grid(), seed);
    EXPECT_LT(norm_l2(apply_T(s.psi) - s.t_psi) / norm_l2(s.t_psi), 1e-3) << seed;
  }
}

TEST(DomainLab, InequalitiesHoldOnThreeSeeds) {
  for (std::uint64_t seed : {0u, 1u, 2u}) expect_all_bounds_hold(make_domain_sample(grid(), seed));
}

TEST(DomainLab, InequalitiesHoldOnAStressProfile) {
  // One bump at the edge of the admissible window, at the smallest admissible width.
  const double centre = 0.35 * grid()->cutoff() / 2.0;
  const double sigma = std::sqrt(2.0 * centre);
  const auto phi = SampledFunction::sample(grid(), [&](double x) {
    const double d = (x - centre) / sigma;
    return cplx(0.0, 3.0) * std::exp(-0.5 * d * d);
  });
  expect_all_bounds_hold(make_domain_sample_from(phi, 99));
}

TEST(DomainLab, DiscontinuityAtZero) {
  // psi(0+) = i int_{y<0} phi, psi(0-) = -i int_{y>0} phi.
  const auto even = SampledFunction::sample(grid(), [](double x) { return cplx(std::exp(-x * x / 2.0)); });
  const auto e = discontinuity_probe(make_domain_sample_from(even));
  const cplx half(0.0, std::sqrt(pi / 2.0));
  EXPECT_LT(std::abs(e.plus - half), 1e-6);
  EXPECT_LT(std::abs(e.minus + half), 1e-6);
  EXPECT_LT(e.est_error, 1e-4);

  const auto odd = SampledFunction::sample(grid(), [](double x) { return cplx(x * std::exp(-x * x / 2.0)); });
  const auto o = discontinuity_probe(make_domain_sample_from(odd));
  EXPECT_LT(std::abs(o.plus - cplx(0.0, -1.0)), 1e-6);
  EXPECT_LT(std::abs(o.minus - cplx(0.0, -1.0)), 1e-6);
}
