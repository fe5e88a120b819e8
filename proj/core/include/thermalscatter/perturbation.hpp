#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "thermalscatter/constants.hpp"
#include "thermalscatter/domainlab.hpp"
#include "thermalscatter/grid.hpp"

namespace ts {

using RealFunction = std::function<double(double)>;

// Real potential W on the T-picture line.
struct PotentialSpec {
  enum class Form { split, power_family, japanese, custom };

  Form form = Form::custom;
  std::string label;
  // split: W = |x|^{1/4} V1 + V2; an empty V1 or V2 means the zero function.
  RealFunction v1, v2;
  double v1_l2 = 0.0;
  double v2_linf = 0.0;
  // power_family: W_r = (1 + x^2)^{-r}.
  double r = 0.0;
  // japanese: W = W_inf <x>^{-s} with |W_inf| <= w_inf_bound.
  RealFunction w_inf;
  double w_inf_bound = 0.0;
  double s = 0.0;
  // custom: W itself, optionally with a declared decay |W(x)| <= c <x>^{-decay}.
  RealFunction w;
  std::optional<double> decay_exponent;

  double operator()(double x) const;
  RealFunction function() const;

  // True for W = 0 identically (by construction, not by sampling).
  bool is_zero() const;

  static PotentialSpec split(RealFunction v1, RealFunction v2, double v1_l2, double v2_linf);
  // Norms measured on the grid: ||V1||_2 by quadrature, ||V2||_inf as the largest sample.
  static PotentialSpec split_on_grid(RealFunction v1, RealFunction v2, const GridPtr& grid);
  static PotentialSpec power_family(double r);
  static PotentialSpec japanese(RealFunction w_inf, double w_inf_bound, double s);
  static PotentialSpec custom(RealFunction w, std::optional<double> decay_exponent = std::nullopt,
                              std::string label = "custom");
  static PotentialSpec zero();
};

// Decay exponent d with |W(x)| <= c <x>^{-d}, when the form determines one.
std::optional<double> decay_exponent(const PotentialSpec& w);

struct Eligibility {
  bool eligible;
  std::string reason;
};

// W R_z(T) Hilbert-Schmidt: W = |x|^{1/4} V with V in L^2 (decay exponent > 1/4).
Eligibility hs_eligibility(const PotentialSpec& w);
// Wave operators: W and |W|^{1/2} both HS-eligible (decay exponent > 1/2).
Eligibility scattering_eligibility(const PotentialSpec& w);

struct KatoBound {
  double epsilon;
  double v_epsilon;
  double b_epsilon;
  double c_hat;
  // Coefficient of ||psi||^2 obtained by carrying the chain of estimates through
  // literally: 2 C ||V1||^2 v^{1/2} + 2 ||V2||_inf^2.
  double b_epsilon_derived;
  bool degenerate;  // V1 = 0: v_epsilon undefined, B_epsilon = ||V2||_inf^2
};

// sqrt2 pi M^2 with M re-estimated at the given resolution.
double estimate_constant_C(int points_per_decade = 2000);

// v = (2 C ||V1||^2 / eps)^{2/3}, B = 2 C v^{1/4} + ||V2||_inf^2.
KatoBound kato_constants(const PotentialSpec& w, double epsilon, double c_hat = constants::frozen::c_hat);

struct KatoCheck {
  KatoBound bound;
  int samples;
  int violations;          // lhs - rhs > domain_slack
  double worst_margin;     // min over samples of rhs - lhs
  double max_ratio;        // max over samples of lhs / rhs
  double max_ratio_derived;  // same with b_epsilon_derived
};

// ||W psi||^2 <= eps ||T psi||^2 + B_eps ||psi||^2 over the given domain samples.
KatoCheck kato_check(const PotentialSpec& w, const KatoBound& bound, const std::vector<DomainSample>& samples);

// Scaled inner integrals of |F|^2 along y for fixed x (z = +-i):
// int_0^inf M0(2 sqrt min)^2 N0(2 sqrt max)^2 dy.
double kernel_square_bracket(double x);

struct IwResult {
  double value;
  double weighted_l1;  // int_0^inf w(x)/sqrt(x) dx
  double bound;        // sqrt2 C_M C_N / 4 * weighted_l1
};

// I_w = int int_{(0,inf)^2} w(x) |F|(x, y)^2 dx dy at z = +-i.
// Throws DivergenceError when int w/sqrt(x) does not converge at infinity.
IwResult iw_integral(const RealFunction& w);

// int_x^inf e^{-2 sqrt(2y)} / sqrt(y) dy by quadrature, and the closed form e^{-2 sqrt(2x)}/sqrt2.
double inner_identity_quadrature(double x);
double inner_identity_closed_form(double x);

struct RefinementLevel {
  double cutoff;
  int n_per_side;
  double value;
};

struct HsReport {
  cplx z;
  double norm_sq;
  double route_a;  // quadrature to infinity (z = +-i) or bounded-factor identity (general z)
  double route_b;  // discretized Frobenius norm of W R_z on the grid
  std::vector<RefinementLevel> refinement_trace;
};

// ||W R_z(T)||_HS^2. norm_sq is route_a.
HsReport hs_norm_squared(const PotentialSpec& w, cplx z, const GridPtr& grid,
                         const std::vector<std::pair<double, int>>& refinement = {});

// Frobenius norm squared of the discretized W R_z(T) on the grid.
double hs_norm_squared_discrete(const PotentialSpec& w, cplx z, const GridPtr& grid);

// 4 Gamma(5/4) Gamma(2r - 1/4) / Gamma(2r) = int (1+x^2)^{-2r} |x|^{-1/2} dx; r > 1/8.
double wr_criterion_integral(double r);
// The same integral by quadrature.
double wr_criterion_quadrature(double r);

enum class Picture { t_picture, physical };

struct JapaneseVerdict {
  bool eligible;
  double threshold;  // s must exceed this
  std::string reason;
};

JapaneseVerdict japanese_bracket_check(double w_inf_bound, double s, Picture picture = Picture::t_picture);

// (T + W - z)^{-1} f = R_z(T) (1 + W R_z(T))^{-1} f on each half-line.
SampledFunction apply_perturbed_resolvent(const PotentialSpec& w, cplx z, const SampledFunction& f);
// |Im z| ||R_z(T+W) f|| / ||f||, at most 1 for self-adjoint T + W.
double weyl_proxy_ratio(const PotentialSpec& w, cplx z, const SampledFunction& f);

}  // namespace ts
