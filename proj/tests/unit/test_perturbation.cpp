#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "thermalscatter/domainlab.hpp"
#include "thermalscatter/error.hpp"
#include "thermalscatter/operators.hpp"
#include "thermalscatter/perturbation.hpp"

using namespace ts;

namespace {
const cplx I(0.0, 1.0);
}

TEST(Perturbation, KatoConstantsClosedForm) {
  // With C = 1 and ||V1||^2 = 1/2: v = eps^{-2/3}, B = 2 v^{1/4} + ||V2||^2.
  const auto w = PotentialSpec::split(nullptr, [](double) { return 0.5; }, std::sqrt(0.5), 0.5);
  const auto k1 = kato_constants(w, 1.0, 1.0);
  EXPECT_NEAR(k1.v_epsilon, 1.0, 1e-15);
  EXPECT_NEAR(k1.b_epsilon, 2.25, 1e-15);
  EXPECT_NEAR(k1.b_epsilon_derived, 1.0 + 0.5, 1e-15);
  const auto k2 = kato_constants(w, 0.125, 1.0);
  EXPECT_NEAR(k2.v_epsilon, 4.0, 1e-14);
  EXPECT_NEAR(k2.b_epsilon, 2.0 * std::sqrt(2.0) + 0.25, 1e-14);
  EXPECT_FALSE(k2.degenerate);

  const auto only_v2 = PotentialSpec::split(nullptr, [](double) { return 3.0; }, 0.0, 3.0);
  const auto d = kato_constants(only_v2, 0.01);
  EXPECT_TRUE(d.degenerate);
  EXPECT_EQ(d.b_epsilon, 9.0);

  EXPECT_THROW(kato_constants(w, 0.0), ContractError);
  EXPECT_THROW(kato_constants(PotentialSpec::power_family(1.0), 0.1), ContractError);
}

TEST(Perturbation, KatoBoundHoldsOnDomainSamples) {
  const auto grid = build_grid(40.0, 256);
  const auto w = PotentialSpec::split_on_grid([](double x) { return std::exp(-x * x); },
                                              [](double x) { return 0.5 / (1.0 + x * x); }, grid);
  EXPECT_NEAR(w.v1_l2, std::pow(std::numbers::pi / 2.0, 0.25), 1e-8);
  EXPECT_NEAR(w.v2_linf, 0.5, 1e-3);
  std::vector<DomainSample> samples;
  for (std::uint64_t s = 0; s < 20; ++s) samples.push_back(make_domain_sample(grid, s));
  for (double eps : {1.0, 0.1, 0.01}) {
    const auto chk = kato_check(w, kato_constants(w, eps), samples);
    EXPECT_EQ(chk.samples, 20);
    EXPECT_EQ(chk.violations, 0) << eps;
    EXPECT_LE(chk.max_ratio, 1.0) << eps;
    EXPECT_LE(chk.max_ratio_derived, 1.0) << eps;
  }
}

TEST(Perturbation, JapaneseBracketThresholds) {
  EXPECT_FALSE(japanese_bracket_check(1.0, 0.25).eligible);
  EXPECT_TRUE(japanese_bracket_check(1.0, 0.2500001).eligible);
  EXPECT_EQ(japanese_bracket_check(1.0, 0.3).threshold, 0.25);
  EXPECT_FALSE(japanese_bracket_check(1.0, 1.25, Picture::physical).eligible);
  EXPECT_TRUE(japanese_bracket_check(1.0, 1.3, Picture::physical).eligible);
  EXPECT_THROW(japanese_bracket_check(1.0, 0.0), DomainError);
  EXPECT_THROW(japanese_bracket_check(-1.0, 1.0), DomainError);
}

TEST(Perturbation, Eligibility) {
  EXPECT_TRUE(hs_eligibility(PotentialSpec::power_family(0.3)).eligible);
  EXPECT_TRUE(scattering_eligibility(PotentialSpec::power_family(0.3)).eligible);
  EXPECT_TRUE(hs_eligibility(PotentialSpec::power_family(0.2)).eligible);
  EXPECT_FALSE(scattering_eligibility(PotentialSpec::power_family(0.2)).eligible);
  EXPECT_FALSE(scattering_eligibility(PotentialSpec::power_family(0.25)).eligible);
  EXPECT_FALSE(hs_eligibility(PotentialSpec::power_family(0.1)).eligible);
  EXPECT_TRUE(scattering_eligibility(PotentialSpec::zero()).eligible);
  EXPECT_FALSE(hs_eligibility(PotentialSpec::custom([](double) { return 1.0; })).eligible);
  const auto split = PotentialSpec::split([](double) { return 0.0; }, [](double) { return 1.0; }, 0.0, 1.0);
  EXPECT_FALSE(hs_eligibility(split).eligible);
  EXPECT_THROW(hs_norm_squared(PotentialSpec::power_family(0.1), I, build_grid(10.0, 16)), PreconditionError);
}

TEST(Perturbation, PowerFamilyIntegralMatchesGammaOracle) {
  for (double r : {0.13, 0.2, 0.5, 1.0, 2.5}) {
    const double want = 4.0 * oracle::gamma(1.25) * oracle::gamma(2.0 * r - 0.25) / oracle::gamma(2.0 * r);
    EXPECT_NEAR(wr_criterion_integral(r), want, 1e-12 * want) << r;
    EXPECT_NEAR(wr_criterion_quadrature(r), want, 1e-8 * want) << r;
  }
  EXPECT_THROW(wr_criterion_integral(0.125), DivergenceError);
  EXPECT_THROW(wr_criterion_quadrature(0.1), DivergenceError);
}

TEST(Perturbation, PowerFamilyIntegralGrowsTowardsTheThreshold) {
  double prev = 0.0;
  for (double r : {1.0, 0.5, 0.3, 0.2, 0.15, 0.13, 0.126}) {
    const double v = wr_criterion_integral(r);
    EXPECT_GT(v, prev) << r;
    prev = v;
  }
  EXPECT_GT(wr_criterion_integral(0.13), 10.0 * wr_criterion_integral(0.5));
}

TEST(Perturbation, InnerIdentity) {
  for (double x : {0.0, 0.3, 2.0, 10.0})
    EXPECT_NEAR(inner_identity_quadrature(x), inner_identity_closed_form(x), 1e-10 * inner_identity_closed_form(x)) << x;
  EXPECT_THROW(inner_identity_quadrature(-1.0), DomainError);
}

TEST(Perturbation, IwBoundAndDivergence) {
  const auto iw = iw_integral([](double x) { return std::exp(-x); });
  EXPECT_NEAR(iw.weighted_l1, std::sqrt(std::numbers::pi), 1e-9);
  EXPECT_GT(iw.value, 0.0);
  EXPECT_LE(iw.value, iw.bound);
  EXPECT_THROW(iw_integral([](double x) { return 1.0 / std::sqrt(1.0 + x); }), DivergenceError);
  EXPECT_THROW(iw_integral([](double) { return 1.0; }), DivergenceError);
}

TEST(Perturbation, HilbertSchmidtRoutesAgree) {
  const auto grid = build_grid(40.0, 256);
  const auto w = PotentialSpec::power_family(0.5);
  const auto plus = hs_norm_squared(w, I, grid);
  const auto minus = hs_norm_squared(w, -I, grid);
  EXPECT_NEAR(plus.route_a, minus.route_a, 1e-10 * plus.route_a);
  EXPECT_NEAR(plus.route_b, plus.route_a, 5e-2 * plus.route_a);
  EXPECT_EQ(plus.norm_sq, plus.route_a);
  const auto general = hs_norm_squared(w, cplx(1.0, 2.0), grid);
  EXPECT_NEAR(general.route_b, general.route_a, 5e-2 * general.route_a);
}

TEST(Perturbation, PerturbedResolventIsBoundedAndSolves) {
  const auto grid = build_grid(40.0, 256);
  const auto w = PotentialSpec::custom([](double x) { return 2.0 * std::exp(-x * x); }, 100.0, "gauss");
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const auto s = make_domain_sample(grid, seed);
    for (cplx z : {I, -I, cplx(1.0, 1.0)}) {
      EXPECT_LE(weyl_proxy_ratio(w, z, s.psi), 1.02) << seed << " " << z;
      // (T + W - z) u = f.
      const auto u = apply_perturbed_resolvent(w, z, s.psi);
      const auto lhs = apply_T(u) + multiply(u, [&w](double x) { return w(x); }) - z * u;
      EXPECT_LT(norm_l2(lhs - s.psi) / norm_l2(s.psi), 2e-2) << seed << " " << z;
    }
  }
  EXPECT_THROW(apply_perturbed_resolvent(w, cplx(1.0, 0.0), SampledFunction(grid)), DomainError);
}

TEST(Perturbation, ZeroPotentialReducesToFreeResolvent) {
  const auto grid = build_grid(20.0, 64);
  const auto f = SampledFunction::sample(grid, [](double x) { return cplx(std::exp(-x * x), 0.0); });
  const auto a = apply_perturbed_resolvent(PotentialSpec::zero(), I, f);
  const auto b = apply_resolvent(I, f);
  EXPECT_LT(norm_l2(a - b), 1e-12 * norm_l2(b));
}
