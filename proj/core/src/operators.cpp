#include "thermalscatter/operators.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>

#include "thermalscatter/error.hpp"
#include "thermalscatter/parallel.hpp"
#include "thermalscatter/specfun.hpp"

namespace ts {

namespace {

using std::numbers::pi;
constexpr cplx I{0.0, 1.0};

double sgn(double x) { return x > 0.0 ? 1.0 : -1.0; }

void require_nonreal(cplx z, const char* where) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError(std::string(where) + ": non-finite z");
  if (z.imag() == 0.0) throw DomainError(std::string(where) + ": z must be off the real axis");
}

// Ray angle of the kernel arguments on the half-line with sign s_x.
double ray_angle(cplx z, double s_x) {
  const double phi = std::abs(std::arg(z));
  const double s = z.imag() > 0.0 ? 1.0 : -1.0;
  return s * (phi / 2.0 - (pi / 4.0) * (s_x + 1.0));
}

// Scaled factors of the separable kernel along one half-line:
// I0(u_i) = i0s_i e^{Re u_i}, K0(u_i) = k0s_i e^{-u_i}, u_i = 2 sqrt(|z| a_i) e^{i theta}.
struct RayFactors {
  Eigen::VectorXcd i0s, k0s;
  Eigen::VectorXd re_u, im_u;
};

RayFactors ray_factors(cplx z, double s_x, const Eigen::VectorXd& a) {
  const double theta = ray_angle(z, s_x);
  const double r = std::abs(z);
  RayFactors out;
  const auto n = a.size();
  out.i0s.resize(n);
  out.k0s.resize(n);
  out.re_u.resize(n);
  out.im_u.resize(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    const auto i = static_cast<Eigen::Index>(k);
    const cplx u = std::polar(2.0 * std::sqrt(r * a[i]), theta);
    out.i0s[i] = specfun::bessel_i0_scaled(u);
    out.k0s[i] = specfun::bessel_k0_scaled(u);
    out.re_u[i] = u.real();
    out.im_u[i] = u.imag();
  });
  return out;
}

// I0(u_j) K0(u_i) for a_j <= a_i.
cplx separable_entry(const RayFactors& f, Eigen::Index lo, Eigen::Index hi) {
  return f.i0s[lo] * f.k0s[hi] * std::exp(cplx(f.re_u[lo] - f.re_u[hi], -f.im_u[hi]));
}

// (F g)(a_i) = sum_j w_j F(a_i, a_j) g_j along one half-line, in O(n).
Eigen::VectorXcd separable_apply(const RayFactors& f, const Eigen::VectorXd& w, const Eigen::VectorXcd& g) {
  const auto n = g.size();
  Eigen::VectorXcd out(n);
  cplx prefix = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) prefix *= std::exp(f.re_u[i - 1] - f.re_u[i]);
    prefix += w[i] * f.i0s[i] * g[i];
    out[i] = f.k0s[i] * std::exp(cplx(0.0, -f.im_u[i])) * prefix;
  }
  cplx suffix = 0.0;
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    const Eigen::Index j = i + 1;
    suffix = (suffix + w[j] * f.k0s[j] * std::exp(cplx(0.0, -f.im_u[j])) * g[j]) * std::exp(f.re_u[i] - f.re_u[j]);
    out[i] += f.i0s[i] * suffix;
  }
  return out;
}

}  // namespace

Eigen::VectorXcd real_times(const Eigen::MatrixXd& m, const Eigen::VectorXcd& v) {
  const Eigen::VectorXd re = m * v.real();
  const Eigen::VectorXd im = m * v.imag();
  Eigen::VectorXcd out(re.size());
  for (Eigen::Index i = 0; i < re.size(); ++i) out[i] = cplx(re[i], im[i]);
  return out;
}

cplx kernel_B(double x, double y) {
  if (x == 0.0 || y == 0.0) throw DomainError("kernel_B: coordinates must be nonzero");
  if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("kernel_B: non-finite coordinate");
  const double s = (sgn(x) - sgn(y)) / 2.0;
  if (s == 0.0) return 0.0;
  return I * s * specfun::bessel_j0(2.0 * std::sqrt(std::abs(x * y)));
}

cplx kernel_F(cplx z, double x, double y) {
  require_nonreal(z, "kernel_F");
  if (x == 0.0 || y == 0.0) throw DomainError("kernel_F: coordinates must be nonzero");
  const double theta = ray_angle(z, sgn(x));
  const double r = std::abs(z);
  const cplx lo = std::polar(2.0 * std::sqrt(r * std::min(std::abs(x), std::abs(y))), theta);
  const cplx hi = std::polar(2.0 * std::sqrt(r * std::max(std::abs(x), std::abs(y))), theta);
  return specfun::bessel_i0_scaled(lo) * specfun::bessel_k0_scaled(hi) *
         std::exp(cplx(lo.real() - hi.real(), -hi.imag()));
}

double kernel_F_abs(cplx z, double x, double y) {
  require_nonreal(z, "kernel_F_abs");
  if (x == 0.0 || y == 0.0) throw DomainError("kernel_F_abs: coordinates must be nonzero");
  if (z.real() == 0.0 && std::abs(z.imag()) == 1.0) {
    const double lo = 2.0 * std::sqrt(std::min(std::abs(x), std::abs(y)));
    const double hi = 2.0 * std::sqrt(std::max(std::abs(x), std::abs(y)));
    return specfun::amplitude_m0_scaled(lo) * specfun::amplitude_n0_scaled(hi) *
           std::exp((lo - hi) / std::numbers::sqrt2);
  }
  return std::abs(kernel_F(z, x, y));
}

SampledFunction KernelOperator::apply(const SampledFunction& f) const {
  const auto& g = f.layout();
  SampledFunction out(f.grid());
  parallel_for(g.size(), [&](std::size_t i) {
    cplx sum = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) sum += g.weight(j) * kernel(g.node(i), g.node(j)) * f[j];
    out.values()[static_cast<Eigen::Index>(i)] = sum;
  });
  return out;
}

KernelOperator kernel_operator_B() { return {kernel_B, "B"}; }

KernelOperator kernel_operator_F(cplx z) {
  require_nonreal(z, "kernel_operator_F");
  return {[z](double x, double y) { return (sgn(x) + sgn(y)) * kernel_F(z, x, y); }, "F"};
}

KernelOperator kernel_operator_F_abs(cplx z) {
  require_nonreal(z, "kernel_operator_F_abs");
  return {[z](double x, double y) { return cplx(kernel_F_abs(z, x, y)); }, "Fabs"};
}

Eigen::VectorXcd positive_half(const SampledFunction& f) {
  const auto& g = f.layout();
  Eigen::VectorXcd out(g.n_per_side());
  for (int i = 0; i < g.n_per_side(); ++i) out[i] = f[g.positive_index(i)];
  return out;
}

Eigen::VectorXcd negative_half(const SampledFunction& f) {
  const auto& g = f.layout();
  Eigen::VectorXcd out(g.n_per_side());
  for (int i = 0; i < g.n_per_side(); ++i) out[i] = f[g.negative_index(i)];
  return out;
}

SampledFunction from_halves(const GridPtr& grid, const Eigen::VectorXcd& positive, const Eigen::VectorXcd& negative) {
  const int n = grid->n_per_side();
  if (positive.size() != n || negative.size() != n) throw ContractError("from_halves: half-vector length mismatch");
  SampledFunction out(grid);
  for (int i = 0; i < n; ++i) {
    out.values()[static_cast<Eigen::Index>(grid->positive_index(i))] = positive[i];
    out.values()[static_cast<Eigen::Index>(grid->negative_index(i))] = negative[i];
  }
  return out;
}

ThermalOperator::ThermalOperator(GridPtr grid) : grid_(std::move(grid)) {
  const int n = grid_->n_per_side();
  a_nodes_ = Eigen::Map<const Eigen::VectorXd>(grid_->half_nodes().data(), n);
  w_ = Eigen::Map<const Eigen::VectorXd>(grid_->half_weights().data(), n);
  sqrt_w_ = w_.cwiseSqrt();
  a_.resize(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    const auto i = static_cast<Eigen::Index>(k);
    for (Eigen::Index j = 0; j <= i; ++j) a_(i, j) = specfun::bessel_j0(2.0 * std::sqrt(a_nodes_[i] * a_nodes_[j]));
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) a_(i, j) = a_(j, i);
  c_ = sqrt_w_.asDiagonal() * a_ * sqrt_w_.asDiagonal();
}

const Eigen::MatrixXd& ThermalOperator::polar_block() const {
  std::call_once(p_once_, [this] {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c_);
    Eigen::VectorXd signs = eig.eigenvalues().unaryExpr([](double l) { return l >= 0.0 ? 1.0 : -1.0; });
    p_ = eig.eigenvectors() * signs.asDiagonal() * eig.eigenvectors().transpose();
  });
  return p_;
}

Eigen::MatrixXd ThermalOperator::t_block(int side) const {
  if (side != 1 && side != -1) throw ContractError("t_block: side must be +1 or -1");
  return static_cast<double>(side) * (c_ * a_nodes_.asDiagonal() * c_);
}

SampledFunction ThermalOperator::apply_B(const SampledFunction& f) const {
  if (!f.layout().same_layout(*grid_)) throw ContractError("apply_B: grid mismatch");
  const Eigen::VectorXcd p = positive_half(f).cwiseProduct(w_);
  const Eigen::VectorXcd m = negative_half(f).cwiseProduct(w_);
  return from_halves(f.grid(), I * real_times(a_, m), -I * real_times(a_, p));
}

SampledFunction ThermalOperator::apply_S(const SampledFunction& f) const {
  if (!f.layout().same_layout(*grid_)) throw ContractError("apply_S: grid mismatch");
  const Eigen::MatrixXd& p = polar_block();
  const Eigen::VectorXcd hp = positive_half(f).cwiseProduct(sqrt_w_);
  const Eigen::VectorXcd hm = negative_half(f).cwiseProduct(sqrt_w_);
  const Eigen::VectorXcd out_p = (I * real_times(p, hm)).cwiseQuotient(sqrt_w_.cast<cplx>());
  const Eigen::VectorXcd out_m = (-I * real_times(p, hp)).cwiseQuotient(sqrt_w_.cast<cplx>());
  return from_halves(f.grid(), out_p, out_m);
}

SampledFunction ThermalOperator::apply_T(const SampledFunction& f) const {
  SampledFunction g = apply_B(f);
  const auto& x = grid_->nodes();
  for (std::size_t i = 0; i < x.size(); ++i) g.values()[static_cast<Eigen::Index>(i)] *= -x[i];
  return apply_B(g);
}

SampledFunction ThermalOperator::apply_resolvent(cplx z, const SampledFunction& f) const {
  require_nonreal(z, "apply_resolvent");
  if (!f.layout().same_layout(*grid_)) throw ContractError("apply_resolvent: grid mismatch");
  const RayFactors pos = ray_factors(z, 1.0, a_nodes_);
  const RayFactors neg = ray_factors(z, -1.0, a_nodes_);
  const Eigen::VectorXcd out_p = 2.0 * separable_apply(pos, w_, positive_half(f));
  const Eigen::VectorXcd out_m = -2.0 * separable_apply(neg, w_, negative_half(f));
  return from_halves(f.grid(), out_p, out_m);
}

SampledFunction ThermalOperator::apply_resolvent_conjugated(cplx z, const SampledFunction& f) const {
  require_nonreal(z, "apply_resolvent_conjugated");
  SampledFunction g = apply_B(f);
  const auto& y = grid_->nodes();
  for (std::size_t i = 0; i < y.size(); ++i) g.values()[static_cast<Eigen::Index>(i)] /= (-y[i] - z);
  return apply_B(g);
}

Eigen::MatrixXcd ThermalOperator::resolvent_block(cplx z, int side) const {
  require_nonreal(z, "resolvent_block");
  if (side != 1 && side != -1) throw ContractError("resolvent_block: side must be +1 or -1");
  const RayFactors f = ray_factors(z, side, a_nodes_);
  const auto n = a_nodes_.size();
  Eigen::MatrixXcd m(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    const auto i = static_cast<Eigen::Index>(k);
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = 2.0 * side * sqrt_w_[i] * separable_entry(f, j, i) * sqrt_w_[j];
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) m(i, j) = m(j, i);
  return m;
}

ThermalOperatorPtr thermal_operator(const GridPtr& grid) {
  static std::mutex mutex;
  static std::map<const QuadratureGrid*, std::weak_ptr<const ThermalOperator>> cache;
  // The most recently used operators stay alive between calls, so loops that go
  // through the free functions do not rebuild the dense blocks every time.
  static std::deque<ThermalOperatorPtr> recent;
  constexpr std::size_t keep = 4;
  std::lock_guard lock(mutex);
  auto touch = [&](const ThermalOperatorPtr& op) {
    if (!recent.empty() && recent.front() == op) return;
    std::erase(recent, op);
    recent.push_front(op);
    if (recent.size() > keep) recent.pop_back();
  };
  auto it = cache.find(grid.get());
  if (it != cache.end()) {
    if (auto op = it->second.lock(); op && op->grid() == grid) {
      touch(op);
      return op;
    }
  }
  // Drop expired entries so that a recycled address never resolves to a stale operator.
  for (auto e = cache.begin(); e != cache.end();) e = e->second.expired() ? cache.erase(e) : std::next(e);
  auto op = std::make_shared<const ThermalOperator>(grid);
  cache[grid.get()] = op;
  touch(op);
  return op;
}

SampledFunction apply_B(const SampledFunction& f) { return thermal_operator(f.grid())->apply_B(f); }
SampledFunction apply_T(const SampledFunction& f) { return thermal_operator(f.grid())->apply_T(f); }
SampledFunction apply_resolvent(cplx z, const SampledFunction& f) {
  return thermal_operator(f.grid())->apply_resolvent(z, f);
}

ThermalPicture::ThermalPicture(double lambda_) : lambda(lambda_), x_c(-1.0 / lambda_) {
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw ContractError("ThermalPicture: lambda must be positive");
}

std::pair<double, double> kappa_pair(double x, const ThermalPicture& picture) {
  const double u = x - picture.x_c;
  if (u == 0.0) throw PoleError("kappa_pair: x equals the critical point");
  const double c = std::sqrt(8.0 / pi);
  const double s = 2.0 * std::sqrt(std::abs(u));
  return {-c * sgn(u) * specfun::kelvin(specfun::Kelvin::kei, s), c * specfun::kelvin(specfun::Kelvin::ker, s)};
}

cplx interpolate(const SampledFunction& f, double x) {
  const auto& g = f.layout();
  const int n = g.n_per_side();
  const auto& a = g.half_nodes();
  const double ax = std::abs(x);
  // Stencil of four neighbours on the same side of 0, clamped at the ends.
  const auto upper = std::lower_bound(a.begin(), a.end(), ax);
  int lo = static_cast<int>(upper - a.begin()) - 2;
  lo = std::clamp(lo, 0, n - 4);
  cplx sum = 0.0;
  for (int k = lo; k < lo + 4; ++k) {
    double basis = 1.0;
    for (int m = lo; m < lo + 4; ++m)
      if (m != k) basis *= (ax - a[m]) / (a[k] - a[m]);
    const std::size_t idx = x > 0.0 ? g.positive_index(k) : g.negative_index(k);
    sum += basis * f[idx];
  }
  return sum;
}

namespace {

Transported shift(const SampledFunction& f, double offset) {
  const auto& g = f.layout();
  const double cutoff = g.cutoff();
  Transported out{SampledFunction(f.grid()), 0.0, false};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double src = g.node(i) + offset;
    if (std::abs(src) <= cutoff && src != 0.0) out.function.values()[static_cast<Eigen::Index>(i)] = interpolate(f, src);
  }
  double total = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double dst = g.node(j) - offset;
    const double mass = g.weight(j) * std::norm(f[j]);
    total += mass;
    if (std::abs(dst) > cutoff) out.truncated_mass += mass;
  }
  out.truncated = out.truncated_mass > 1e-12 * std::max(total, 1e-300);
  return out;
}

}  // namespace

Transported to_physical(const SampledFunction& f, const ThermalPicture& picture) { return shift(f, picture.x_c); }

Transported from_physical(const SampledFunction& f, const ThermalPicture& picture) {
  return shift(f, -picture.x_c);
}

std::function<double(double)> thermal_potential(std::function<double(double)> v, const ThermalPicture& picture) {
  return [v = std::move(v), lambda = picture.lambda](double x) { return (1.0 + lambda * x) * v(x); };
}

std::function<double(double)> transported_potential(std::function<double(double)> w, const ThermalPicture& picture) {
  return [w = std::move(w), picture](double x) { return picture.lambda * w(x - picture.x_c); };
}

}  // namespace ts
