#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "thermalscatter/error.hpp"
#include "thermalscatter/operators.hpp"
#include "thermalscatter/specfun.hpp"

using namespace ts;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

double sgn(double x) { return x > 0.0 ? 1.0 : -1.0; }

GridPtr default_grid() { return build_grid(40.0, 256, 2.0); }

double relative_l2(const SampledFunction& got, const SampledFunction& want) {
  return norm_l2(got - want) / norm_l2(want);
}

}  // namespace

TEST(Operators, BMapsExponentialsToExponentials) {
  // B e^{-a|x|} = i sgn(x) e^{-|x|/a} / a.
  const auto grid = default_grid();
  for (double a : {0.5, 1.0, 2.0}) {
    const auto f = SampledFunction::sample(grid, [a](double x) { return cplx(std::exp(-a * std::abs(x))); });
    const auto want =
        SampledFunction::sample(grid, [a](double x) { return I * sgn(x) * std::exp(-std::abs(x) / a) / a; });
    EXPECT_LT(relative_l2(apply_B(f), want), 1e-6) << a;
  }
}

TEST(Operators, TOfTheExponential) {
  // f = e^{-|x|}: T f = -x f'' - f' = sgn(x)(1 - |x|) e^{-|x|}.
  const auto grid = default_grid();
  const auto f = SampledFunction::sample(grid, [](double x) { return cplx(std::exp(-std::abs(x))); });
  const auto want =
      SampledFunction::sample(grid, [](double x) { return cplx(sgn(x) * (1.0 - std::abs(x)) * std::exp(-std::abs(x))); });
  const auto tf = apply_T(f);
  EXPECT_LT(relative_l2(tf, want), 1e-5);

  // Independent check of the closed form by central differences away from the kink.
  for (double x : {-3.0, -0.7, 0.4, 2.5}) {
    const double h = 1e-4;
    auto e = [](double u) { return std::exp(-std::abs(u)); };
    const double d1 = (e(x + h) - e(x - h)) / (2.0 * h);
    const double d2 = (e(x + h) - 2.0 * e(x) + e(x - h)) / (h * h);
    EXPECT_NEAR(-x * d2 - d1, sgn(x) * (1.0 - std::abs(x)) * e(x), 1e-6) << x;
  }
}

TEST(Operators, BKernelIsHermitianAndVanishesOnEachHalfLine) {
  for (double x : {-3.0, -0.2, 0.1, 5.0})
    for (double y : {-4.0, -0.5, 0.3, 2.0}) {
      EXPECT_EQ(kernel_B(x, y), std::conj(kernel_B(y, x)));
      if (sgn(x) == sgn(y)) EXPECT_EQ(kernel_B(x, y), cplx(0.0));
      else EXPECT_NEAR(std::abs(kernel_B(x, y)), std::abs(specfun::bessel_j0(2.0 * std::sqrt(std::abs(x * y)))), 1e-15);
    }
}

TEST(Operators, FKernelMatchesHighPrecisionProduct) {
  for (cplx z : {cplx(0.0, 1.0), cplx(0.0, -1.0), cplx(-2.0, 3.0), cplx(1.0, -0.5)})
    for (double x : {-6.0, -0.3, 0.2, 4.0})
      for (double y : {0.05, 1.5, 9.0}) {
        const double yy = sgn(x) * y;
        const double phi = std::abs(std::arg(z));
        const double s = z.imag() > 0.0 ? 1.0 : -1.0;
        const double theta = s * (phi / 2.0 - (pi / 4.0) * (sgn(x) + 1.0));
        const double r = std::abs(z);
        const auto lo = oracle::on_ray(2.0 * std::sqrt(r * std::min(std::abs(x), y)), theta);
        const auto hi = oracle::on_ray(2.0 * std::sqrt(r * std::max(std::abs(x), y)), theta);
        const auto want = oracle::to_double(oracle::i0(lo) * oracle::k0(hi));
        const auto got = kernel_F(z, x, yy);
        EXPECT_LE(std::abs(got - want), 1e-9 * std::abs(want)) << z << " " << x << " " << yy;
        EXPECT_NEAR(kernel_F_abs(z, x, yy), std::abs(want), 1e-9 * std::abs(want));
      }
  EXPECT_THROW(kernel_F(cplx(1.0, 0.0), 1.0, 1.0), DomainError);
  EXPECT_THROW(kernel_F(I, 0.0, 1.0), DomainError);
}

TEST(Operators, ResolventRoutesAgreeAndInvertTMinusZ) {
  const auto grid = build_grid(40.0, 512, 2.0);
  const auto op = thermal_operator(grid);
  const auto phi = SampledFunction::sample(grid, [](double x) { return cplx(std::exp(-(x - 4.0) * (x - 4.0) / 4.0)); });
  const auto f = op->apply_B(phi);
  for (cplx z : {cplx(0.0, 1.0), cplx(0.0, -1.0), cplx(1.0, 1.0), cplx(-2.0, 3.0)}) {
    const auto rk = op->apply_resolvent(z, f);
    const auto rb = op->apply_resolvent_conjugated(z, f);
    EXPECT_LT(relative_l2(rk, rb), 1e-3) << z;
    EXPECT_LT(norm_l2(op->apply_T(rk) - z * rk - f) / norm_l2(f), 1e-2) << z;
    // Self-adjointness of T: ||R_z|| <= 1 / |Im z|.
    EXPECT_LE(norm_l2(rk) * std::abs(z.imag()), norm_l2(f) * (1.0 + 1e-3)) << z;
  }
  EXPECT_THROW(op->apply_resolvent(cplx(2.0, 0.0), f), DomainError);
}

TEST(Operators, ResolventBlockMatchesKernelApplication) {
  const auto grid = build_grid(20.0, 64);
  const auto op = thermal_operator(grid);
  const auto f = SampledFunction::sample(grid, [](double x) { return cplx(std::exp(-x * x), x); });
  const cplx z(0.5, -1.5);
  const auto rf = op->apply_resolvent(z, f);
  const Eigen::VectorXd sw = op->sqrt_weights();
  const Eigen::VectorXcd p = op->resolvent_block(z, 1) * sw.cwiseProduct(positive_half(f)).eval();
  const Eigen::VectorXcd m = op->resolvent_block(z, -1) * sw.cwiseProduct(negative_half(f)).eval();
  EXPECT_LT((p - sw.cwiseProduct(positive_half(rf))).norm(), 1e-10 * p.norm());
  EXPECT_LT((m - sw.cwiseProduct(negative_half(rf))).norm(), 1e-10 * m.norm());
  EXPECT_THROW(op->resolvent_block(z, 0), ContractError);
}

TEST(Operators, SIsAUnitaryInvolution) {
  const auto grid = default_grid();
  const auto op = thermal_operator(grid);
  const auto f = SampledFunction::sample(grid, [](double x) { return cplx(std::cos(x), std::sin(2.0 * x)) / (1.0 + x * x); });
  const auto sf = op->apply_S(f);
  EXPECT_LT(relative_l2(op->apply_S(sf), f), 1e-10);
  EXPECT_NEAR(norm_l2(sf), norm_l2(f), 1e-10 * norm_l2(f));
  const Eigen::MatrixXd& p = op->polar_block();
  EXPECT_LT((p * p - Eigen::MatrixXd::Identity(p.rows(), p.cols())).norm(), 1e-9);
  EXPECT_LT((p - p.transpose()).norm(), 1e-12);
}

TEST(Operators, OperatorCacheIsPerGrid) {
  const auto a = build_grid(10.0, 16);
  const auto b = build_grid(10.0, 16);
  EXPECT_EQ(thermal_operator(a).get(), thermal_operator(a).get());
  EXPECT_NE(thermal_operator(a).get(), thermal_operator(b).get());
}

TEST(Operators, KappaPairMatchesKelvinFunctions) {
  const ThermalPicture pic(0.5);
  EXPECT_DOUBLE_EQ(pic.x_c, -2.0);
  const double c = std::sqrt(8.0 / pi);
  for (double x : {-9.0, -2.5, -1.0, 0.0, 3.0}) {
    const double u = x - pic.x_c;
    const auto kk = oracle::ker_kei(2.0 * std::sqrt(std::abs(u)));
    const auto [k0, k1] = kappa_pair(x, pic);
    EXPECT_NEAR(k0, -c * sgn(u) * kk.imag(), 1e-12);
    EXPECT_NEAR(k1, c * kk.real(), 1e-12 * std::max(1.0, std::abs(kk.real())));
  }
  EXPECT_THROW(kappa_pair(pic.x_c, pic), PoleError);
  // kei(0) = -pi/4, so kappa_0 jumps by sqrt(8/pi) pi/2 across x_c.
  const double e = 1e-10;
  const double jump = kappa_pair(pic.x_c + e, pic).first - kappa_pair(pic.x_c - e, pic).first;
  EXPECT_NEAR(jump, c * pi / 2.0, 1e-8);
}

TEST(Operators, PhysicalPictureTransportRoundTrips) {
  const auto grid = default_grid();
  const ThermalPicture pic(0.25);
  const auto f = SampledFunction::sample(grid, [](double x) { return cplx(std::exp(-(x - 10.0) * (x - 10.0))); });
  const auto there = to_physical(f, pic);
  EXPECT_FALSE(there.truncated);
  // (S f)(x) = f(x + x_c): the bump moves from 10 to 10 - x_c = 14.
  const double peak = std::abs(interpolate(there.function, 14.0));
  EXPECT_NEAR(peak, 1.0, 1e-2);
  const auto back = from_physical(there.function, pic);
  EXPECT_LT(relative_l2(back.function, f), 1e-3);

  const auto edge = SampledFunction::sample(grid, [](double x) { return cplx(std::exp(-(x - 38.0) * (x - 38.0))); });
  const auto cut = to_physical(edge, pic);
  EXPECT_TRUE(cut.truncated);
  EXPECT_GT(cut.truncated_mass, 0.0);

  const auto w = transported_potential([](double x) { return x * x; }, pic);
  EXPECT_DOUBLE_EQ(w(1.0), 0.25 * 25.0);
  const auto wv = thermal_potential([](double) { return 2.0; }, pic);
  EXPECT_DOUBLE_EQ(wv(4.0), 4.0);
}
