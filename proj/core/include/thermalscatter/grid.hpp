#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

namespace ts {

using cplx = std::complex<double>;

// Gauss-Legendre rule of order n on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

// Composite Gauss-Legendre grid on [-cutoff, cutoff] graded towards 0 through x = +-u^g.
// Node layout: indices [0, n) hold -a_{n-1} < ... < -a_0, indices [n, 2n) hold a_0 < ... < a_{n-1},
// so node n + i and node n - 1 - i are mirror images.
class QuadratureGrid {
 public:
  QuadratureGrid(double cutoff, int n_per_side, double grading_exponent);

  std::size_t size() const { return nodes_.size(); }
  int n_per_side() const { return n_; }
  double cutoff() const { return cutoff_; }
  double grading_exponent() const { return grading_; }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  // Positive half-line nodes a_i and weights (shared by the mirrored side).
  const std::vector<double>& half_nodes() const { return half_nodes_; }
  const std::vector<double>& half_weights() const { return half_weights_; }

  std::size_t positive_index(int i) const { return static_cast<std::size_t>(n_ + i); }
  std::size_t negative_index(int i) const { return static_cast<std::size_t>(n_ - 1 - i); }
  std::size_t mirror(std::size_t k) const { return size() - 1 - k; }

  // Orders of the panels in u, first panel (adjacent to 0) first.
  const std::vector<int>& panel_orders() const { return panel_orders_; }

  bool same_layout(const QuadratureGrid& other) const;

 private:
  double cutoff_;
  int n_;
  double grading_;
  std::vector<int> panel_orders_;
  std::vector<double> half_nodes_, half_weights_;
  std::vector<double> nodes_, weights_;
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

// Throws ContractError on degenerate parameters.
GridPtr build_grid(double cutoff, int n_per_side, double grading_exponent = 2.0);

class SampledFunction {
 public:
  explicit SampledFunction(GridPtr grid);
  SampledFunction(GridPtr grid, Eigen::VectorXcd values);

  static SampledFunction sample(GridPtr grid, const std::function<cplx(double)>& f);

  const GridPtr& grid() const { return grid_; }
  const QuadratureGrid& layout() const { return *grid_; }
  Eigen::VectorXcd& values() { return values_; }
  const Eigen::VectorXcd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  cplx operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

  SampledFunction& operator+=(const SampledFunction& o);
  SampledFunction& operator-=(const SampledFunction& o);
  SampledFunction& operator*=(cplx s);

 private:
  GridPtr grid_;
  Eigen::VectorXcd values_;
};

SampledFunction operator+(SampledFunction a, const SampledFunction& b);
SampledFunction operator-(SampledFunction a, const SampledFunction& b);
SampledFunction operator*(cplx s, SampledFunction a);

// Throws ContractError when f and g live on different grids.
void require_same_grid(const SampledFunction& f, const SampledFunction& g);

cplx inner(const SampledFunction& f, const SampledFunction& g);
double norm_l2(const SampledFunction& f);
double norm_l1(const SampledFunction& f);
double norm_linf(const SampledFunction& f);

// Pointwise multiplication by a real function of x.
SampledFunction multiply(const SampledFunction& f, const std::function<double(double)>& m);

}  // namespace ts
