#include "thermalscatter/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "thermalscatter/error.hpp"

namespace ts {

namespace {

// Legendre polynomial P_n and its derivative at x, by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw ContractError("gauss_legendre: order must be positive");
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureGrid::QuadratureGrid(double cutoff, int n_per_side, double grading_exponent)
    : cutoff_(cutoff), n_(n_per_side), grading_(grading_exponent) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw ContractError("build_grid: cutoff must be positive");
  if (n_per_side < 8) throw ContractError("build_grid: n_per_side must be >= 8");
  if (!(grading_exponent >= 1.0) || !std::isfinite(grading_exponent))
    throw ContractError("build_grid: grading_exponent must be >= 1");

  constexpr int base_order = 8;
  if (n_per_side < 2 * base_order) {
    panel_orders_.push_back(n_per_side);
  } else {
    // The panel next to 0 carries twice the base order plus the remainder.
    const int first = 2 * base_order + n_per_side % base_order;
    panel_orders_.push_back(first);
    for (int k = 0; k < (n_per_side - first) / base_order; ++k) panel_orders_.push_back(base_order);
  }

  const double umax = std::pow(cutoff, 1.0 / grading_exponent);
  const double h = umax / static_cast<double>(panel_orders_.size());
  half_nodes_.reserve(n_per_side);
  half_weights_.reserve(n_per_side);
  for (std::size_t p = 0; p < panel_orders_.size(); ++p) {
    const GaussLegendre rule = gauss_legendre(panel_orders_[p]);
    const double a = h * static_cast<double>(p);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double u = a + 0.5 * h * (rule.nodes[k] + 1.0);
      const double wu = 0.5 * h * rule.weights[k];
      half_nodes_.push_back(std::pow(u, grading_exponent));
      half_weights_.push_back(wu * grading_exponent * std::pow(u, grading_exponent - 1.0));
    }
  }

  nodes_.resize(2 * static_cast<std::size_t>(n_));
  weights_.resize(nodes_.size());
  for (int i = 0; i < n_; ++i) {
    nodes_[positive_index(i)] = half_nodes_[i];
    weights_[positive_index(i)] = half_weights_[i];
    nodes_[negative_index(i)] = -half_nodes_[i];
    weights_[negative_index(i)] = half_weights_[i];
  }
}

bool QuadratureGrid::same_layout(const QuadratureGrid& other) const {
  return this == &other || (n_ == other.n_ && cutoff_ == other.cutoff_ && grading_ == other.grading_);
}

GridPtr build_grid(double cutoff, int n_per_side, double grading_exponent) {
  return std::make_shared<const QuadratureGrid>(cutoff, n_per_side, grading_exponent);
}

SampledFunction::SampledFunction(GridPtr grid)
    : grid_(std::move(grid)), values_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid_->size()))) {}

SampledFunction::SampledFunction(GridPtr grid, Eigen::VectorXcd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_->size())
    throw ContractError("SampledFunction: value count " + std::to_string(values_.size()) +
                        " does not match grid size " + std::to_string(grid_->size()));
}

SampledFunction SampledFunction::sample(GridPtr grid, const std::function<cplx(double)>& f) {
  SampledFunction out(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) out.values_[static_cast<Eigen::Index>(i)] = f(grid->node(i));
  return out;
}

void require_same_grid(const SampledFunction& f, const SampledFunction& g) {
  if (!f.layout().same_layout(g.layout())) throw ContractError("grid mismatch between sampled functions");
}

SampledFunction& SampledFunction::operator+=(const SampledFunction& o) {
  require_same_grid(*this, o);
  values_ += o.values_;
  return *this;
}

SampledFunction& SampledFunction::operator-=(const SampledFunction& o) {
  require_same_grid(*this, o);
  values_ -= o.values_;
  return *this;
}

SampledFunction& SampledFunction::operator*=(cplx s) {
  values_ *= s;
  return *this;
}

SampledFunction operator+(SampledFunction a, const SampledFunction& b) { return a += b; }
SampledFunction operator-(SampledFunction a, const SampledFunction& b) { return a -= b; }
SampledFunction operator*(cplx s, SampledFunction a) { return a *= s; }

cplx inner(const SampledFunction& f, const SampledFunction& g) {
  require_same_grid(f, g);
  const auto& w = f.layout().weights();
  cplx sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * std::conj(f[i]) * g[i];
  return sum;
}

double norm_l2(const SampledFunction& f) {
  const auto& w = f.layout().weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * std::norm(f[i]);
  return std::sqrt(sum);
}

double norm_l1(const SampledFunction& f) {
  const auto& w = f.layout().weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * std::abs(f[i]);
  return sum;
}

double norm_linf(const SampledFunction& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

SampledFunction multiply(const SampledFunction& f, const std::function<double(double)>& m) {
  SampledFunction out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i)
    out.values()[static_cast<Eigen::Index>(i)] = m(f.layout().node(i)) * f[i];
  return out;
}

}  // namespace ts
