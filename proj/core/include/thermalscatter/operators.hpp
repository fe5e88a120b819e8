#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "thermalscatter/grid.hpp"

namespace ts {

// Pointwise-evaluable integral kernel.
struct KernelOperator {
  std::function<cplx(double, double)> kernel;
  std::string label;

  cplx operator()(double x, double y) const { return kernel(x, y); }
  SampledFunction apply(const SampledFunction& f) const;
};

// i (sgn x - sgn y)/2 J0(2 sqrt|xy|).
cplx kernel_B(double x, double y);
// I0(2 sqrt(|z| min) e^{i theta}) K0(2 sqrt(|z| max) e^{i theta}), theta = +-[phi/2 - (pi/4)(sgn x + 1)].
cplx kernel_F(cplx z, double x, double y);
// |F|, evaluated through M0 N0 at z = +-i and through kernel_F otherwise.
double kernel_F_abs(cplx z, double x, double y);

KernelOperator kernel_operator_B();
KernelOperator kernel_operator_F(cplx z);
KernelOperator kernel_operator_F_abs(cplx z);

// Discretized T-picture operators on one grid.
//
// With a_i the positive half-line nodes, B only couples the two half-lines through
// the real symmetric block A_ij = J0(2 sqrt(a_i a_j)):
//   (Bf)(a_i) = i sum_j A_ij w_j f(-a_j),   (Bf)(-a_i) = -i sum_j A_ij w_j f(a_j).
// In the weighted coordinates h = sqrt(w) f the block becomes C = D^{1/2} A D^{1/2}.
class ThermalOperator {
 public:
  explicit ThermalOperator(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  const Eigen::MatrixXd& bessel_block() const { return a_; }
  const Eigen::MatrixXd& symmetric_block() const { return c_; }
  // sign(C): the orthogonal polar factor of C. Built on first use.
  const Eigen::MatrixXd& polar_block() const;
  const Eigen::VectorXd& half_nodes() const { return a_nodes_; }
  const Eigen::VectorXd& sqrt_weights() const { return sqrt_w_; }

  // T preserves each half-line; in weighted coordinates its restriction is
  // side * C diag(a) C (side = +1 for x > 0, -1 for x < 0).
  Eigen::MatrixXd t_block(int side) const;

  SampledFunction apply_B(const SampledFunction& f) const;
  // Unitary involution obtained by replacing C with its polar factor; used where
  // exact unitarity matters more than the raw quadrature of B (long time evolution).
  SampledFunction apply_S(const SampledFunction& f) const;
  SampledFunction apply_T(const SampledFunction& f) const;

  // Kernel route, O(n) per half-line through prefix sums of the separable kernel.
  SampledFunction apply_resolvent(cplx z, const SampledFunction& f) const;
  // B (-y - z)^{-1} B.
  SampledFunction apply_resolvent_conjugated(cplx z, const SampledFunction& f) const;

  // Resolvent restricted to one half-line (side = +1 for x > 0, -1 for x < 0) in
  // weighted coordinates: sqrt(w_i) (+-2) F_z(a_i, a_j) sqrt(w_j).
  Eigen::MatrixXcd resolvent_block(cplx z, int side) const;

 private:
  GridPtr grid_;
  Eigen::VectorXd a_nodes_, w_, sqrt_w_;
  Eigen::MatrixXd a_, c_;
  mutable Eigen::MatrixXd p_;
  mutable std::once_flag p_once_;
};

using ThermalOperatorPtr = std::shared_ptr<const ThermalOperator>;

// Cached per grid: repeated calls with the same grid return the same instance.
ThermalOperatorPtr thermal_operator(const GridPtr& grid);

SampledFunction apply_B(const SampledFunction& f);
SampledFunction apply_T(const SampledFunction& f);
SampledFunction apply_resolvent(cplx z, const SampledFunction& f);

// Split a sampled function into half-line vectors indexed by a_i, and back.
Eigen::VectorXcd positive_half(const SampledFunction& f);
Eigen::VectorXcd negative_half(const SampledFunction& f);
SampledFunction from_halves(const GridPtr& grid, const Eigen::VectorXcd& positive, const Eigen::VectorXcd& negative);

// Real matrix times complex vector without promoting the matrix.
Eigen::VectorXcd real_times(const Eigen::MatrixXd& m, const Eigen::VectorXcd& v);

// Thermal coupling lambda > 0 and the critical point x_c = -1/lambda.
struct ThermalPicture {
  double lambda;
  double x_c;

  explicit ThermalPicture(double lambda);
};

// (kappa_0, kappa_1) = (-sqrt(8/pi) sgn(x - x_c) kei(2 sqrt|x - x_c|), sqrt(8/pi) ker(2 sqrt|x - x_c|)).
std::pair<double, double> kappa_pair(double x, const ThermalPicture& picture);

struct Transported {
  SampledFunction function;
  // Squared L2 mass of the source that falls outside the target grid.
  double truncated_mass = 0.0;
  bool truncated = false;
};

// (S_lambda f)(x) = f(x + x_c) and its inverse, by cubic local interpolation
// with the stencil clamped at the grid ends; samples beyond the cutoff are zero.
Transported to_physical(const SampledFunction& f, const ThermalPicture& picture);
Transported from_physical(const SampledFunction& f, const ThermalPicture& picture);

// Cubic Lagrange interpolation of f at an arbitrary point on the same side of 0.
cplx interpolate(const SampledFunction& f, double x);

// W_V(x) = (1 + lambda x) V(x).
std::function<double(double)> thermal_potential(std::function<double(double)> v, const ThermalPicture& picture);
// W~(x) = lambda W(x - x_c), the T-picture image lambda S* W S.
std::function<double(double)> transported_potential(std::function<double(double)> w, const ThermalPicture& picture);

}  // namespace ts
