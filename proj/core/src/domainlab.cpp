#include "thermalscatter/domainlab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "thermalscatter/error.hpp"
#include "thermalscatter/operators.hpp"
#include "thermalscatter/specfun.hpp"

namespace ts {

using std::numbers::pi;

// The engine's sequence is fixed by the standard; the conversions below avoid the
// implementation-defined distributions so samples are identical across toolchains.
SampleRng::SampleRng(std::uint64_t seed) : engine_(seed) {}

double SampleRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SampleRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double SampleRng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

int SampleRng::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

HolderConstants holder_constants(double k) {
  if (!(k >= 0.0 && k < 1.0)) throw DomainError("holder_constants: k must lie in [0, 1)");
  HolderConstants h{};
  h.k = k;
  h.c_k = 2.0 / std::sqrt(pi) * specfun::gamma_fn((k + 1.0) / 2.0) / specfun::gamma_fn((k + 2.0) / 2.0);
  h.i_k = 2.0 / (std::pow(1.0 + k, (1.0 + k) / 2.0) * std::pow(1.0 - k, (1.0 - k) / 2.0));
  h.g_k = h.c_k * h.c_k * h.i_k * pi / std::cos(k * pi / 2.0);
  return h;
}

double q_k(double k, double v) {
  if (!(k >= 0.0 && k < 1.0)) throw DomainError("q_k: k must lie in [0, 1)");
  if (!(v > 0.0)) throw DomainError("q_k: v must be positive");
  return pi / (std::pow(v, 1.0 - k) * std::cos(k * pi / 2.0));
}

DomainSample make_domain_sample_from(const SampledFunction& phi, std::uint64_t seed) {
  const auto op = thermal_operator(phi.grid());
  DomainSample s{seed, phi, op->apply_B(phi), SampledFunction(phi.grid()), {}};
  SampledFunction x_phi = multiply(phi, [](double x) { return x; });
  s.t_psi = cplx(-1.0) * op->apply_B(x_phi);
  s.norms.psi_l2 = norm_l2(s.psi);
  s.norms.t_psi_l2 = norm_l2(s.t_psi);
  s.norms.b_psi_l1 = norm_l1(op->apply_B(s.psi));
  s.norms.psi_linf = norm_linf(s.psi);
  return s;
}

DomainSample make_domain_sample(const GridPtr& grid, std::uint64_t seed) {
  SampleRng rng(seed);
  const double half = grid->cutoff() / 2.0;
  const int count = rng.integer(1, 5);
  struct Bump {
    cplx amplitude;
    double centre, sigma;
  };
  std::vector<Bump> bumps;
  for (int k = 0; k < count; ++k) {
    Bump b{};
    b.amplitude = cplx(rng.normal(), rng.normal());
    b.centre = rng.uniform(-0.35 * half, 0.35 * half);
    const double sigma_min = std::sqrt(std::max(1.0, 2.0 * std::abs(b.centre)));
    b.sigma = std::min(sigma_min * rng.uniform(1.0, 1.25), std::max(sigma_min, (half - std::abs(b.centre)) / 3.0));
    bumps.push_back(b);
  }
  const SampledFunction phi = SampledFunction::sample(grid, [&](double x) {
    cplx v = 0.0;
    for (const auto& b : bumps) {
      const double d = (x - b.centre) / b.sigma;
      v += b.amplitude * std::exp(-0.5 * d * d);
    }
    return v;
  });
  return make_domain_sample_from(phi, seed);
}

double check_l1(const DomainSample& s) {
  return 2.0 * pi * s.norms.t_psi_l2 * s.norms.psi_l2 - s.norms.b_psi_l1 * s.norms.b_psi_l1;
}

LinfCheck check_linf(const DomainSample& s) {
  const double linf = s.norms.psi_linf;
  return {2.0 * pi * s.norms.t_psi_l2 * s.norms.psi_l2 - linf * linf,
          std::sqrt(pi) * (s.norms.t_psi_l2 + s.norms.psi_l2) - linf};
}

HolderCheck check_holder(const DomainSample& s, double k, int pair_count, std::uint64_t pair_seed) {
  HolderCheck out{holder_constants(k), 0.0, 0};
  if (pair_count < 1) throw ContractError("check_holder: pair_count must be positive");
  const auto& g = s.psi.layout();
  const int n = g.n_per_side();
  const auto& a = g.half_nodes();
  auto spacing = [&](int i) {
    const double left = i > 0 ? a[i] - a[i - 1] : a[i];
    const double right = i + 1 < n ? a[i + 1] - a[i] : left;
    return std::max(left, right);
  };
  const double scale = std::pow(s.norms.t_psi_l2, 1.0 + k) * std::pow(s.norms.psi_l2, 1.0 - k);
  if (scale == 0.0) return out;
  SampleRng rng(pair_seed ^ (s.seed * 0x9E3779B97F4A7C15ULL));
  int attempts = 0;
  while (out.pairs < pair_count && attempts < 100 * pair_count) {
    ++attempts;
    const int i = rng.integer(0, n - 1);
    const int j = rng.integer(0, n - 1);
    const double gap = std::abs(a[i] - a[j]);
    if (gap < 2.0 * std::max(spacing(i), spacing(j))) continue;
    const bool positive = rng.uniform() < 0.5;
    const std::size_t ii = positive ? g.positive_index(i) : g.negative_index(i);
    const std::size_t jj = positive ? g.positive_index(j) : g.negative_index(j);
    const double diff = std::norm(s.psi[ii] - s.psi[jj]);
    out.worst_ratio = std::max(out.worst_ratio, diff / (std::pow(gap, k) * scale));
    ++out.pairs;
  }
  return out;
}

double check_decay(const DomainSample& s) {
  const auto& g = s.psi.layout();
  const double scale = std::pow(s.norms.t_psi_l2, 0.25) * std::pow(s.norms.psi_l2, 0.75);
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(s.psi[i]) * std::pow(std::abs(g.node(i)), 0.25) / scale);
  return worst;
}

namespace {

// Neville extrapolation to 0 through the first m points.
cplx extrapolate_to_zero(const double* x, const cplx* y, int m) {
  cplx p[4];
  for (int i = 0; i < m; ++i) p[i] = y[i];
  for (int level = 1; level < m; ++level)
    for (int i = 0; i + level < m; ++i)
      p[i] = (x[i + level] * p[i] - x[i] * p[i + 1]) / (x[i + level] - x[i]);
  return p[0];
}

}  // namespace

OneSidedLimits discontinuity_probe(const SampledFunction& f) {
  const auto& g = f.layout();
  double x[4];
  cplx yp[4], ym[4];
  for (int i = 0; i < 4; ++i) {
    x[i] = g.half_nodes()[i];
    yp[i] = f[g.positive_index(i)];
    ym[i] = f[g.negative_index(i)];
  }
  OneSidedLimits out{extrapolate_to_zero(x, yp, 4), extrapolate_to_zero(x, ym, 4), 0.0};
  out.est_error = std::max(std::abs(out.plus - extrapolate_to_zero(x, yp, 3)),
                           std::abs(out.minus - extrapolate_to_zero(x, ym, 3)));
  return out;
}

OneSidedLimits discontinuity_probe(const DomainSample& s) { return discontinuity_probe(s.psi); }

}  // namespace ts
