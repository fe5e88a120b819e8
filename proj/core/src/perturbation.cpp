#include "thermalscatter/perturbation.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "thermalscatter/error.hpp"
#include "thermalscatter/operators.hpp"
#include "thermalscatter/specfun.hpp"

namespace ts {

namespace {

using std::numbers::pi;
using std::numbers::sqrt2;
namespace quad = boost::math::quadrature;

constexpr double quad_tol = 1e-11;

double eval_or_zero(const RealFunction& f, double x) { return f ? f(x) : 0.0; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double PotentialSpec::operator()(double x) const {
  switch (form) {
    case Form::split:
      return std::pow(std::abs(x), 0.25) * eval_or_zero(v1, x) + eval_or_zero(v2, x);
    case Form::power_family:
      return std::pow(1.0 + x * x, -r);
    case Form::japanese:
      return eval_or_zero(w_inf, x) * std::pow(1.0 + x * x, -s / 2.0);
    case Form::custom:
      return eval_or_zero(w, x);
  }
  return 0.0;
}

RealFunction PotentialSpec::function() const {
  return [self = *this](double x) { return self(x); };
}

bool PotentialSpec::is_zero() const {
  switch (form) {
    case Form::split:
      return !v1 && !v2;
    case Form::japanese:
      return !w_inf || w_inf_bound == 0.0;
    case Form::custom:
      return !w;
    case Form::power_family:
      return false;
  }
  return false;
}

PotentialSpec PotentialSpec::split(RealFunction v1, RealFunction v2, double v1_l2, double v2_linf) {
  if (!(v1_l2 >= 0.0) || !(v2_linf >= 0.0) || !std::isfinite(v1_l2) || !std::isfinite(v2_linf))
    throw ContractError("split potential: norms must be finite and nonnegative");
  PotentialSpec p;
  p.form = Form::split;
  p.label = "split";
  p.v1 = std::move(v1);
  p.v2 = std::move(v2);
  p.v1_l2 = v1_l2;
  p.v2_linf = v2_linf;
  return p;
}

PotentialSpec PotentialSpec::split_on_grid(RealFunction v1, RealFunction v2, const GridPtr& grid) {
  double l2 = 0.0, linf = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double x = grid->node(i);
    const double a = eval_or_zero(v1, x);
    l2 += grid->weight(i) * a * a;
    linf = std::max(linf, std::abs(eval_or_zero(v2, x)));
  }
  return split(std::move(v1), std::move(v2), std::sqrt(l2), linf);
}

PotentialSpec PotentialSpec::power_family(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ContractError("power family: r must be positive");
  PotentialSpec p;
  p.form = Form::power_family;
  p.label = "wr:r=" + fmt(r);
  p.r = r;
  return p;
}

PotentialSpec PotentialSpec::japanese(RealFunction w_inf, double w_inf_bound, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw ContractError("japanese potential: s must be positive");
  if (!(w_inf_bound >= 0.0)) throw ContractError("japanese potential: bound must be nonnegative");
  PotentialSpec p;
  p.form = Form::japanese;
  p.label = "japanese:s=" + fmt(s);
  p.w_inf = std::move(w_inf);
  p.w_inf_bound = w_inf_bound;
  p.s = s;
  return p;
}

PotentialSpec PotentialSpec::custom(RealFunction w, std::optional<double> decay, std::string label) {
  PotentialSpec p;
  p.form = Form::custom;
  p.label = std::move(label);
  p.w = std::move(w);
  p.decay_exponent = decay;
  return p;
}

PotentialSpec PotentialSpec::zero() { return custom(nullptr, std::numeric_limits<double>::infinity(), "zero"); }

std::optional<double> decay_exponent(const PotentialSpec& w) {
  if (w.is_zero()) return std::numeric_limits<double>::infinity();
  switch (w.form) {
    case PotentialSpec::Form::power_family:
      return 2.0 * w.r;
    case PotentialSpec::Form::japanese:
      return w.s;
    case PotentialSpec::Form::custom:
      return w.decay_exponent;
    case PotentialSpec::Form::split:
      return std::nullopt;
  }
  return std::nullopt;
}

Eligibility hs_eligibility(const PotentialSpec& w) {
  if (w.is_zero()) return {true, "zero potential"};
  if (w.form == PotentialSpec::Form::split) {
    if (w.v2) return {false, "split form with V2 != 0 is not of the form |x|^{1/4} V with V in L^2"};
    return {true, "W = |x|^{1/4} V1 with V1 in L^2"};
  }
  const auto d = decay_exponent(w);
  if (!d) return {false, "no decay exponent declared"};
  if (*d > 0.25) return {true, "decay exponent " + fmt(*d) + " > 1/4"};
  return {false, "decay exponent " + fmt(*d) + " <= 1/4: int W^2/sqrt|x| diverges"};
}

Eligibility scattering_eligibility(const PotentialSpec& w) {
  if (w.is_zero()) return {true, "zero potential"};
  const auto d = decay_exponent(w);
  if (!d) return {false, "|W|^{1/2} eligibility cannot be certified without a decay exponent"};
  if (*d > 0.5) return {true, "W and |W|^{1/2} both HS-eligible (decay exponent " + fmt(*d) + " > 1/2)"};
  return {false, "|W|^{1/2} has decay exponent " + fmt(*d / 2.0) + " <= 1/4, so |W|^{1/2} R(T) is not Hilbert-Schmidt"};
}

double estimate_constant_C(int points_per_decade) { return constants::estimate_constants(points_per_decade).c_hat; }

KatoBound kato_constants(const PotentialSpec& w, double epsilon, double c_hat) {
  if (w.form != PotentialSpec::Form::split) throw ContractError("kato_constants: split form required");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ContractError("kato_constants: epsilon must be positive");
  KatoBound k{};
  k.epsilon = epsilon;
  k.c_hat = c_hat;
  const double v2sq = w.v2_linf * w.v2_linf;
  if (w.v1_l2 == 0.0) {
    k.degenerate = true;
    k.v_epsilon = 0.0;
    k.b_epsilon = v2sq;
    k.b_epsilon_derived = v2sq;
    return k;
  }
  const double v1sq = w.v1_l2 * w.v1_l2;
  k.v_epsilon = std::pow(2.0 * c_hat * v1sq / epsilon, 2.0 / 3.0);
  k.b_epsilon = 2.0 * c_hat * std::pow(k.v_epsilon, 0.25) + v2sq;
  k.b_epsilon_derived = 2.0 * c_hat * v1sq * std::sqrt(k.v_epsilon) + 2.0 * v2sq;
  return k;
}

KatoCheck kato_check(const PotentialSpec& w, const KatoBound& bound, const std::vector<DomainSample>& samples) {
  KatoCheck out{bound, 0, 0, std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (const auto& s : samples) {
    const auto& g = s.psi.layout();
    double lhs = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double wi = w(g.node(i));
      lhs += g.weight(i) * wi * wi * std::norm(s.psi[i]);
    }
    const double t2 = s.norms.t_psi_l2 * s.norms.t_psi_l2;
    const double p2 = s.norms.psi_l2 * s.norms.psi_l2;
    const double rhs = bound.epsilon * t2 + bound.b_epsilon * p2;
    const double rhs_derived = bound.epsilon * t2 + bound.b_epsilon_derived * p2;
    ++out.samples;
    if (lhs - rhs > domain_slack) ++out.violations;
    out.worst_margin = std::min(out.worst_margin, rhs - lhs);
    if (rhs > 0.0) out.max_ratio = std::max(out.max_ratio, lhs / rhs);
    if (rhs_derived > 0.0) out.max_ratio_derived = std::max(out.max_ratio_derived, lhs / rhs_derived);
  }
  return out;
}

double kernel_square_bracket(double x) {
  if (!(x >= 0.0)) throw DomainError("kernel_square_bracket: x must be nonnegative");
  const double rx = std::sqrt(x);
  // Beyond t = 30 the factor e^{-2 sqrt2 t} is below 1e-36.
  const double t_max = 30.0;
  auto n_part = [rx](double t) {
    const double u = rx + t;
    if (u <= 0.0) return 0.0;
    const double n0 = specfun::amplitude_n0_scaled(2.0 * u);
    return 2.0 * u * n0 * n0 * std::exp(-2.0 * sqrt2 * t);
  };
  auto m_part = [rx](double t) {
    const double u = rx - t;
    if (u <= 0.0) return 0.0;
    const double m0 = specfun::amplitude_m0_scaled(2.0 * u);
    return 2.0 * u * m0 * m0 * std::exp(-2.0 * sqrt2 * t);
  };
  quad::tanh_sinh<double> ts;
  const double g_n = ts.integrate(n_part, 0.0, t_max, quad_tol);
  const double g_m = rx > 0.0 ? ts.integrate(m_part, 0.0, std::min(rx, t_max), quad_tol) : 0.0;
  const double m0x = specfun::amplitude_m0_scaled(2.0 * rx);
  const double n0x = rx > 0.0 ? specfun::amplitude_n0_scaled(2.0 * rx) : 0.0;
  return m0x * m0x * g_n + n0x * n0x * g_m;
}

namespace {

// int_0^inf f(x) dx as int_0^1 f + int_0^1 f(1/v^2) 2/v^3 dv.
double half_line_integral(const std::function<double(double)>& f) {
  quad::tanh_sinh<double> ts;
  const double head = ts.integrate(f, 0.0, 1.0, quad_tol);
  auto tail = [&f](double v) {
    const double x = 1.0 / (v * v);
    if (!std::isfinite(x)) return 0.0;
    const double fx = f(x);
    return fx == 0.0 ? 0.0 : fx * 2.0 / (v * v * v);
  };
  const double rest = ts.integrate(tail, 0.0, 1.0, quad_tol);
  return head + rest;
}

void require_weighted_l1(const RealFunction& w) {
  // sqrt(x) w(x) must decay for int w/sqrt(x) to converge at infinity.
  const double a = std::sqrt(1e8) * std::abs(w(1e8));
  const double b = std::sqrt(1e10) * std::abs(w(1e10));
  const double c = std::sqrt(1e12) * std::abs(w(1e12));
  if (c > 0.0 && c >= b * (1.0 - 1e-12) && b >= a * (1.0 - 1e-12))
    throw DivergenceError("iw_integral: int w(x)/sqrt(x) dx diverges at infinity");
}

}  // namespace

IwResult iw_integral(const RealFunction& w) {
  require_weighted_l1(w);
  IwResult out{};
  out.weighted_l1 = half_line_integral([&w](double x) { return x > 0.0 ? w(x) / std::sqrt(x) : 0.0; });
  out.value = half_line_integral([&w](double x) {
    const double wx = w(x);
    return wx == 0.0 ? 0.0 : wx * kernel_square_bracket(x);
  });
  if (!std::isfinite(out.value) || !std::isfinite(out.weighted_l1))
    throw DivergenceError("iw_integral: quadrature did not produce a finite value");
  out.bound = sqrt2 * constants::frozen::c_m * constants::frozen::c_n / 4.0 * out.weighted_l1;
  return out;
}

double inner_identity_quadrature(double x) {
  if (!(x >= 0.0)) throw DomainError("inner_identity_quadrature: x must be nonnegative");
  quad::exp_sinh<double> es;
  auto f = [x](double t) {
    const double y = x + t;
    return y > 0.0 ? std::exp(-2.0 * std::sqrt(2.0 * y)) / std::sqrt(y) : 0.0;
  };
  return es.integrate(f, quad_tol);
}

double inner_identity_closed_form(double x) { return std::exp(-2.0 * std::sqrt(2.0 * x)) / sqrt2; }

double hs_norm_squared_discrete(const PotentialSpec& w, cplx z, const GridPtr& grid) {
  const auto op = thermal_operator(grid);
  const Eigen::VectorXd& a = op->half_nodes();
  double total = 0.0;
  for (int side : {1, -1}) {
    const Eigen::MatrixXcd m = op->resolvent_block(z, side);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double wi = w(side * a[i]);
      total += wi * wi * m.row(i).squaredNorm();
    }
  }
  return total;
}

namespace {

bool is_plus_minus_i(cplx z) { return z.real() == 0.0 && std::abs(z.imag()) == 1.0; }

// || W R_i (I + (z - i) R_z) ||_F^2 on the grid.
double hs_bounded_factor(const PotentialSpec& w, cplx z, const GridPtr& grid) {
  const auto op = thermal_operator(grid);
  const Eigen::VectorXd& a = op->half_nodes();
  const cplx i_unit(0.0, 1.0);
  const cplx anchor = z.imag() > 0.0 ? i_unit : -i_unit;
  double total = 0.0;
  for (int side : {1, -1}) {
    Eigen::MatrixXcd factor = (z - anchor) * op->resolvent_block(z, side);
    factor.diagonal().array() += 1.0;
    Eigen::MatrixXcd m = op->resolvent_block(anchor, side) * factor;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double wi = w(side * a[i]);
      total += wi * wi * m.row(i).squaredNorm();
    }
  }
  return total;
}

}  // namespace

HsReport hs_norm_squared(const PotentialSpec& w, cplx z, const GridPtr& grid,
                         const std::vector<std::pair<double, int>>& refinement) {
  if (z.imag() == 0.0) throw DomainError("hs_norm_squared: z must be off the real axis");
  const Eligibility e = hs_eligibility(w);
  if (!e.eligible) throw PreconditionError("hs_norm_squared: " + e.reason);
  HsReport rep{};
  rep.z = z;
  if (is_plus_minus_i(z)) {
    // |F| does not depend on the sign of Im z; the kernel (sgn x + sgn y) F has modulus 2|F|
    // on each quadrant that carries it.
    const double i_plus = iw_integral([&w](double x) { return w(x) * w(x); }).value;
    const double i_minus = iw_integral([&w](double x) { return w(-x) * w(-x); }).value;
    rep.route_a = 4.0 * (i_plus + i_minus);
  } else {
    rep.route_a = hs_bounded_factor(w, z, grid);
  }
  rep.route_b = hs_norm_squared_discrete(w, z, grid);
  rep.norm_sq = rep.route_a;
  for (const auto& [cutoff, n] : refinement)
    rep.refinement_trace.push_back({cutoff, n, hs_norm_squared_discrete(w, z, build_grid(cutoff, n, grid->grading_exponent()))});
  return rep;
}

double wr_criterion_integral(double r) {
  if (!(r > 0.125)) throw DivergenceError("wr_criterion_integral: diverges for r <= 1/8");
  return 4.0 * specfun::gamma_fn(1.25) * specfun::gamma_fn(2.0 * r - 0.25) / specfun::gamma_fn(2.0 * r);
}

double wr_criterion_quadrature(double r) {
  if (!(r > 0.125)) throw DivergenceError("wr_criterion_quadrature: diverges for r <= 1/8");
  // x = u^2 on [0, 1]; x = 1/v^2 and then v = t^{1/p}, p = 8r - 1, on [1, inf).
  const double p = 8.0 * r - 1.0;
  quad::tanh_sinh<double> ts;
  const double head = ts.integrate([r](double u) { return std::pow(1.0 + std::pow(u, 4.0), -2.0 * r); }, 0.0, 1.0, quad_tol);
  const double tail = ts.integrate(
      [r, p](double t) { return std::pow(1.0 + std::pow(t, 4.0 / p), -2.0 * r); }, 0.0, 1.0, quad_tol);
  return 4.0 * (head + tail / p);
}

JapaneseVerdict japanese_bracket_check(double w_inf_bound, double s, Picture picture) {
  if (!(s > 0.0)) throw DomainError("japanese_bracket_check: s must be positive");
  if (!(w_inf_bound >= 0.0) || !std::isfinite(w_inf_bound))
    throw DomainError("japanese_bracket_check: bound must be finite and nonnegative");
  const double threshold = picture == Picture::t_picture ? 0.25 : 1.25;
  const bool ok = s > threshold;
  return {ok, threshold,
          std::string(ok ? "eligible: s = " : "not eligible: s = ") + fmt(s) + (ok ? " > " : " <= ") + fmt(threshold)};
}

SampledFunction apply_perturbed_resolvent(const PotentialSpec& w, cplx z, const SampledFunction& f) {
  if (z.imag() == 0.0) throw DomainError("apply_perturbed_resolvent: z must be off the real axis");
  const auto op = thermal_operator(f.grid());
  const Eigen::VectorXd& a = op->half_nodes();
  const Eigen::VectorXd& sw = op->sqrt_weights();
  Eigen::VectorXcd halves[2];
  const Eigen::VectorXcd rhs[2] = {positive_half(f), negative_half(f)};
  for (int k = 0; k < 2; ++k) {
    const int side = k == 0 ? 1 : -1;
    // (T + W - z)^{-1} = R_z (1 + W R_z)^{-1}, with R_z from its kernel.
    const Eigen::MatrixXcd r = op->resolvent_block(z, side);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(a.size(), a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) m.row(i) += w(side * a[i]) * r.row(i);
    const Eigen::VectorXcd u = Eigen::PartialPivLU<Eigen::MatrixXcd>(m).solve(rhs[k].cwiseProduct(sw.cast<cplx>()));
    halves[k] = (r * u).cwiseQuotient(sw.cast<cplx>());
  }
  return from_halves(f.grid(), halves[0], halves[1]);
}

double weyl_proxy_ratio(const PotentialSpec& w, cplx z, const SampledFunction& f) {
  const double nf = norm_l2(f);
  if (nf == 0.0) return 0.0;
  return std::abs(z.imag()) * norm_l2(apply_perturbed_resolvent(w, z, f)) / nf;
}

}  // namespace ts
