#include "thermalscatter/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "thermalscatter/error.hpp"
#include "thermalscatter/operators.hpp"
#include "thermalscatter/parallel.hpp"
#include "thermalscatter/specfun.hpp"

namespace ts {

namespace {

Eigen::VectorXcd phases(const Eigen::VectorXd& values, double t) {
  Eigen::VectorXcd out(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) out[i] = std::exp(cplx(0.0, values[i] * t));
  return out;
}

double spectral_norm_hermitian(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

SampledFunction free_propagate(double t, const SampledFunction& f) {
  const auto op = thermal_operator(f.grid());
  SampledFunction g = op->apply_S(f);
  const auto& y = f.layout().nodes();
  for (std::size_t i = 0; i < y.size(); ++i) g.values()[static_cast<Eigen::Index>(i)] *= std::exp(cplx(0.0, y[i] * t));
  return op->apply_S(g);
}

SampledFunction perturbed_propagate(double t, const SampledFunction& f, const PotentialSpec& w, int n_steps) {
  if (n_steps < 1) throw ContractError("perturbed_propagate: n_steps must be >= 1");
  if (!std::isfinite(t)) throw ContractError("perturbed_propagate: t must be finite");
  const double dt = t / n_steps;
  const auto& g = f.layout();
  const bool zero = w.is_zero();
  Eigen::VectorXcd half_step(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i)
    half_step[static_cast<Eigen::Index>(i)] = std::exp(cplx(0.0, -w(g.node(i)) * dt / 2.0));
  SampledFunction psi = f;
  for (int step = 0; step < n_steps; ++step) {
    if (!zero) psi.values() = psi.values().cwiseProduct(half_step);
    psi = free_propagate(dt, psi);
    if (!zero) psi.values() = psi.values().cwiseProduct(half_step);
  }
  return psi;
}

Schedule Schedule::geometric(double t0, double t1, double tolerance) {
  if (!(t0 > 0.0) || !(t1 >= t0)) throw ContractError("schedule: need 0 < t0 <= t1");
  if (!(tolerance > 0.0)) throw ContractError("schedule: tolerance must be positive");
  Schedule s;
  s.tolerance = tolerance;
  for (double t = t0; t <= t1 * (1.0 + 1e-12); t *= 2.0) s.times.push_back(t);
  return s;
}

Schedule parse_schedule(const std::string& descriptor, double tolerance) {
  std::istringstream in(descriptor);
  std::string kind, a, b;
  std::getline(in, kind, ':');
  std::getline(in, a, ':');
  std::getline(in, b);
  if (kind != "geom" || a.empty() || b.empty())
    throw ContractError("schedule: expected geom:t0:t1, got '" + descriptor + "'");
  try {
    return Schedule::geometric(std::stod(a), std::stod(b), tolerance);
  } catch (const std::invalid_argument&) {
    throw ContractError("schedule: non-numeric bound in '" + descriptor + "'");
  }
}

ScatteringModel::ScatteringModel(GridPtr grid, PotentialSpec w, ModelOptions options)
    : grid_(std::move(grid)), w_(std::move(w)), options_(options), zero_(w_.is_zero()) {
  const auto op = thermal_operator(grid_);
  const Eigen::VectorXd& a = op->half_nodes();
  const Eigen::VectorXd& sw = op->sqrt_weights();
  const auto n = a.size();

  GridPtr pot_grid;
  Eigen::MatrixXd e;
  Eigen::VectorXd s_nodes, s_weights;
  if (!zero_) {
    pot_grid = build_grid(options_.potential_cutoff_factor * grid_->cutoff(),
                          options_.potential_nodes_factor * grid_->n_per_side(), grid_->grading_exponent());
    const auto m = static_cast<Eigen::Index>(pot_grid->n_per_side());
    s_nodes = Eigen::Map<const Eigen::VectorXd>(pot_grid->half_nodes().data(), m);
    s_weights = Eigen::Map<const Eigen::VectorXd>(pot_grid->half_weights().data(), m);
    e.resize(m, n);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t k) {
      const auto r = static_cast<Eigen::Index>(k);
      for (Eigen::Index i = 0; i < n; ++i) e(r, i) = specfun::bessel_j0(2.0 * std::sqrt(s_nodes[r] * a[i]));
    });
  }

  for (int k = 0; k < 2; ++k) {
    Half& h = halves_[k];
    h.side = k == 0 ? 1 : -1;
    // T acts as -y: on y = side * a this is -side * a.
    h.h0 = -static_cast<double>(h.side) * a;
    if (zero_) continue;
    // The half y = side * a is carried by S to x of the opposite sign.
    Eigen::VectorXd ws(s_nodes.size());
    for (Eigen::Index r = 0; r < s_nodes.size(); ++r) ws[r] = s_weights[r] * w_(-h.side * s_nodes[r]);
    h.v = sw.asDiagonal() * (e.transpose() * ws.asDiagonal() * e) * sw.asDiagonal();
    Eigen::MatrixXd hm = h.v;
    hm.diagonal() += h.h0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hm);
    h.lambda = eig.eigenvalues();
    h.u = eig.eigenvectors();
  }
}

Eigen::VectorXcd ScatteringModel::half_of(const Eigen::VectorXcd& g, int side) const {
  const int n = grid_->n_per_side();
  Eigen::VectorXcd out(n);
  for (int i = 0; i < n; ++i)
    out[i] = g[static_cast<Eigen::Index>(side > 0 ? grid_->positive_index(i) : grid_->negative_index(i))];
  return out;
}

void ScatteringModel::set_half(Eigen::VectorXcd& g, int side, const Eigen::VectorXcd& h) const {
  const int n = grid_->n_per_side();
  for (int i = 0; i < n; ++i)
    g[static_cast<Eigen::Index>(side > 0 ? grid_->positive_index(i) : grid_->negative_index(i))] = h[i];
}

Eigen::VectorXcd ScatteringModel::to_model(const SampledFunction& f) const {
  if (!f.layout().same_layout(*grid_)) throw ContractError("ScatteringModel: grid mismatch");
  const SampledFunction g = thermal_operator(grid_)->apply_S(f);
  Eigen::VectorXcd out = g.values();
  const auto& w = grid_->weights();
  for (std::size_t i = 0; i < w.size(); ++i) out[static_cast<Eigen::Index>(i)] *= std::sqrt(w[i]);
  return out;
}

SampledFunction ScatteringModel::from_model(const Eigen::VectorXcd& g) const {
  Eigen::VectorXcd v = g;
  const auto& w = grid_->weights();
  for (std::size_t i = 0; i < w.size(); ++i) v[static_cast<Eigen::Index>(i)] /= std::sqrt(w[i]);
  return thermal_operator(grid_)->apply_S(SampledFunction(grid_, std::move(v)));
}

Eigen::VectorXcd ScatteringModel::apply_h0(const Eigen::VectorXcd& g) const {
  Eigen::VectorXcd out(g.size());
  for (const Half& h : halves_) set_half(out, h.side, h.h0.cast<cplx>().cwiseProduct(half_of(g, h.side)));
  return out;
}

Eigen::VectorXcd ScatteringModel::apply_h(const Eigen::VectorXcd& g) const {
  if (zero_) return apply_h0(g);
  Eigen::VectorXcd out(g.size());
  for (const Half& h : halves_) {
    const Eigen::VectorXcd x = half_of(g, h.side);
    set_half(out, h.side, h.h0.cast<cplx>().cwiseProduct(x) + real_times(h.v, x));
  }
  return out;
}

Eigen::VectorXcd ScatteringModel::wave_step(double t, const Eigen::VectorXcd& g) const {
  if (zero_) return g;
  Eigen::VectorXcd out(g.size());
  for (const Half& h : halves_) {
    const Eigen::VectorXcd x = half_of(g, h.side).cwiseProduct(phases(h.h0, -t));
    const Eigen::VectorXcd c = real_times(h.u.transpose(), x).cwiseProduct(phases(h.lambda, t));
    set_half(out, h.side, real_times(h.u, c));
  }
  return out;
}

Eigen::VectorXcd ScatteringModel::evolve(double t, const Eigen::VectorXcd& g) const {
  Eigen::VectorXcd out(g.size());
  for (const Half& h : halves_) {
    const Eigen::VectorXcd x = half_of(g, h.side);
    if (zero_) {
      set_half(out, h.side, x.cwiseProduct(phases(h.h0, -t)));
    } else {
      const Eigen::VectorXcd c = real_times(h.u.transpose(), x).cwiseProduct(phases(h.lambda, -t));
      set_half(out, h.side, real_times(h.u, c));
    }
  }
  return out;
}

double ScatteringModel::boundary_mass(const Eigen::VectorXcd& g) const {
  const double edge = options_.leakage_fraction * grid_->cutoff();
  double mass = 0.0;
  for (std::size_t i = 0; i < grid_->size(); ++i)
    if (std::abs(grid_->node(i)) > edge) mass += std::norm(g[static_cast<Eigen::Index>(i)]);
  return mass;
}

namespace {

void require_scattering_eligible(const PotentialSpec& w) {
  const Eligibility e = scattering_eligibility(w);
  if (!e.eligible) throw PreconditionError("wave operators require W and |W|^{1/2} HS-eligible: " + e.reason);
}

struct Limit {
  std::vector<Eigen::VectorXcd> columns;
  std::vector<TracePoint> trace;
  bool converged = false;
  double time = 0.0;
};

// Runs the schedule for all columns at once; stops at the first Cauchy increment below tolerance.
Limit schedule_limit(const ScatteringModel& model, int sign, const std::vector<Eigen::VectorXcd>& g,
                     const Schedule& schedule) {
  Limit out;
  if (schedule.times.empty()) throw ContractError("schedule has no times");
  std::vector<Eigen::VectorXcd> prev;
  for (double t : schedule.times) {
    std::vector<Eigen::VectorXcd> cur(g.size());
    parallel_for(g.size(), [&](std::size_t k) { cur[k] = model.wave_step(-sign * t, g[k]); });
    out.time = t;
    if (!prev.empty()) {
      double inc = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double nk = g[k].norm();
        if (nk > 0.0) inc = std::max(inc, (cur[k] - prev[k]).norm() / nk);
      }
      out.trace.push_back({t, inc});
      if (inc < schedule.tolerance) {
        out.columns = std::move(cur);
        out.converged = true;
        return out;
      }
    }
    prev = std::move(cur);
  }
  out.columns = std::move(prev);
  return out;
}

double identity_defect(const Eigen::MatrixXcd& gram) {
  const Eigen::MatrixXcd d = gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
  return spectral_norm_hermitian(0.5 * (d + d.adjoint()));
}

}  // namespace

WaveResult wave_operator_apply(int sign, const PotentialSpec& w, const SampledFunction& f, const Schedule& schedule,
                               const ModelOptions& options) {
  if (sign != 1 && sign != -1) throw ContractError("wave_operator_apply: sign must be +1 or -1");
  require_scattering_eligible(w);
  if (w.is_zero()) return {f, {}, true, 0.0, 0.0, false};
  const ScatteringModel model(f.grid(), w, options);
  const Limit lim = schedule_limit(model, sign, {model.to_model(f)}, schedule);
  WaveResult out{model.from_model(lim.columns[0]), lim.trace, lim.converged, lim.time, 0.0, false};
  out.boundary_mass = model.boundary_mass(lim.columns[0]);
  out.leakage_warning = out.boundary_mass > options.leakage_threshold;
  return out;
}

ScatteringReport scattering_matrix(const PotentialSpec& w, const std::vector<SampledFunction>& basis,
                                   const Schedule& schedule, const ModelOptions& options) {
  require_scattering_eligible(w);
  if (basis.empty()) throw ContractError("scattering_matrix: empty basis");
  const auto n = static_cast<Eigen::Index>(basis.size());
  for (const auto& f : basis) require_same_grid(basis.front(), f);
  Eigen::MatrixXcd gram(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) gram(j, k) = inner(basis[j], basis[k]);
  if ((gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8)
    throw ContractError("scattering_matrix: basis is not orthonormal to 1e-8");

  ScatteringReport rep;
  rep.basis_size = static_cast<int>(n);
  const ScatteringModel model(basis.front().grid(), w, options);
  std::vector<Eigen::VectorXcd> g(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) g[k] = model.to_model(basis[k]);

  if (w.is_zero()) {
    rep.omega_plus = rep.omega_minus = rep.s_matrix = Eigen::MatrixXcd::Identity(n, n);
    rep.converged = true;
    return rep;
  }

  const Limit plus = schedule_limit(model, 1, g, schedule);
  const Limit minus = schedule_limit(model, -1, g, schedule);
  rep.trace_plus = plus.trace;
  rep.trace_minus = minus.trace;
  rep.converged = plus.converged && minus.converged;
  rep.time_plus = plus.time;
  rep.time_minus = minus.time;
  for (std::size_t i = 0; i < std::max(plus.trace.size(), minus.trace.size()); ++i) {
    const double a = i < plus.trace.size() ? plus.trace[i].increment : 0.0;
    const double b = i < minus.trace.size() ? minus.trace[i].increment : 0.0;
    const double t = i < plus.trace.size() ? plus.trace[i].t : minus.trace[i].t;
    rep.convergence_trace.push_back({t, std::max(a, b)});
  }

  Eigen::MatrixXcd gv(g.front().size(), n), op(g.front().size(), n), om(g.front().size(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    gv.col(k) = g[static_cast<std::size_t>(k)];
    op.col(k) = plus.columns[static_cast<std::size_t>(k)];
    om.col(k) = minus.columns[static_cast<std::size_t>(k)];
  }
  rep.omega_plus = gv.adjoint() * op;
  rep.omega_minus = gv.adjoint() * om;
  rep.s_matrix = om.adjoint() * op;
  rep.unitarity_defect = identity_defect(rep.s_matrix.adjoint() * rep.s_matrix);
  rep.isometry_defect = std::max(identity_defect(op.adjoint() * op), identity_defect(om.adjoint() * om));

  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::VectorXcd h0g = model.apply_h0(gv.col(k));
    const double scale = h0g.norm();
    if (scale == 0.0) continue;
    for (const Eigen::MatrixXcd* omega : {&op, &om}) {
      // Omega H0 g is the limit applied to H0 g, evaluated at the same converged time.
      const double t = omega == &op ? -plus.time : minus.time;
      const Eigen::VectorXcd lhs = model.apply_h(omega->col(k));
      const Eigen::VectorXcd rhs = model.wave_step(t, h0g);
      rep.intertwining_defect = std::max(rep.intertwining_defect, (lhs - rhs).norm() / scale);
    }
    rep.boundary_mass = std::max({rep.boundary_mass, model.boundary_mass(op.col(k)), model.boundary_mass(om.col(k))});
  }
  rep.leakage_warning = rep.boundary_mass > options.leakage_threshold;
  return rep;
}

std::vector<SampledFunction> hermite_basis(const GridPtr& grid, int count, double centre, double sigma) {
  if (count < 1) throw ContractError("hermite_basis: count must be positive");
  if (!(sigma > 0.0)) throw ContractError("hermite_basis: sigma must be positive");
  if (centre <= 0.0) centre = 0.3 * grid->cutoff();
  const auto op = thermal_operator(grid);
  const Eigen::VectorXd& a = op->half_nodes();
  const Eigen::VectorXd& sw = op->sqrt_weights();
  const int n_plus = (count + 1) / 2;
  const int n_minus = count / 2;

  auto packets = [&](int m) {
    Eigen::MatrixXd h(a.size(), m);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double u = (a[i] - centre) / sigma;
      const double env = std::exp(-0.5 * u * u) * sw[i];
      // Physicists' Hermite polynomials by recurrence.
      double p0 = 1.0, p1 = 2.0 * u;
      for (int k = 0; k < m; ++k) {
        h(i, k) = (k == 0 ? p0 : p1) * env;
        if (k >= 1) {
          const double p2 = 2.0 * u * p1 - 2.0 * k * p0;
          p0 = p1;
          p1 = p2;
        }
      }
    }
    // Loewdin orthonormalization.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.transpose() * h);
    const Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
    return Eigen::MatrixXd(h * eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose());
  };

  std::vector<SampledFunction> basis;
  for (int side : {1, -1}) {
    const int m = side > 0 ? n_plus : n_minus;
    if (m == 0) continue;
    const Eigen::MatrixXd h = packets(m);
    for (int k = 0; k < m; ++k) {
      Eigen::VectorXcd half = (h.col(k).array() / sw.array()).cast<cplx>();
      Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(a.size());
      SampledFunction g = side > 0 ? from_halves(grid, half, zero) : from_halves(grid, zero, half);
      basis.push_back(op->apply_S(g));
    }
  }
  return basis;
}

std::vector<SampledFunction> make_basis(const GridPtr& grid, const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  if (colon == std::string::npos || descriptor.substr(0, colon) != "hermite")
    throw ContractError("basis: expected hermite:N, got '" + descriptor + "'");
  int count = 0;
  try {
    count = std::stoi(descriptor.substr(colon + 1));
  } catch (const std::exception&) {
    throw ContractError("basis: non-numeric count in '" + descriptor + "'");
  }
  return hermite_basis(grid, count);
}

namespace {

std::vector<double> singular_values(const Eigen::MatrixXcd& plus, const Eigen::MatrixXcd& minus) {
  std::vector<double> out;
  for (const Eigen::MatrixXcd* m : {&plus, &minus}) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(*m);
    const Eigen::VectorXd s = svd.singularValues();
    out.insert(out.end(), s.data(), s.data() + s.size());
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<std::pair<int, double>> partial_sums(const std::vector<double>& s) {
  std::vector<std::pair<int, double>> out;
  for (int k = 1; k <= 64 && static_cast<std::size_t>(k) <= s.size(); k *= 2) {
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += s[static_cast<std::size_t>(i)];
    out.emplace_back(k, sum);
  }
  return out;
}

double stability(const std::vector<std::pair<int, double>>& a, const std::vector<std::pair<int, double>>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    if (b[i].second > 0.0) worst = std::max(worst, std::abs(a[i].second - b[i].second) / b[i].second);
  return worst;
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

}  // namespace

KbReport resolvent_difference_diagnostics(const PotentialSpec& w, const std::vector<std::pair<double, int>>& grids,
                                          double grading_exponent) {
  require_scattering_eligible(w);
  if (grids.empty()) throw ContractError("resolvent_difference_diagnostics: empty grid ladder");
  KbReport rep{};
  const cplx minus_i(0.0, -1.0);
  for (const auto& [cutoff, n_side] : grids) {
    const GridPtr grid = build_grid(cutoff, n_side, grading_exponent);
    const auto op = thermal_operator(grid);
    const Eigen::VectorXd& a = op->half_nodes();
    KbLevel lvl{};
    lvl.cutoff = cutoff;
    lvl.n_per_side = n_side;
    Eigen::MatrixXcd z1[2], z2[2];
    double f_num = 0.0, f_den = 0.0, d_num = 0.0, d_den = 0.0;
    double rw_norm = 0.0;
    for (int k = 0; k < 2; ++k) {
      const int side = k == 0 ? 1 : -1;
      Eigen::VectorXd wv(a.size()), wsqrt(a.size()), wsgn(a.size());
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        wv[i] = w(side * a[i]);
        wsqrt[i] = std::sqrt(std::abs(wv[i]));
        wsgn[i] = wv[i] > 0.0 ? 1.0 : (wv[i] < 0.0 ? -1.0 : 0.0);
      }
      const Eigen::MatrixXcd r_minus = op->resolvent_block(minus_i, side);
      const Eigen::MatrixXcd r_plus = op->resolvent_block(-minus_i, side);
      // R(T+W) = R(T) (1 + W R(T))^{-1}.
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(a.size(), a.size());
      m += wv.cast<cplx>().asDiagonal() * r_minus;
      const Eigen::MatrixXcd r_pert = r_minus * Eigen::PartialPivLU<Eigen::MatrixXcd>(m).inverse();

      const Eigen::MatrixXcd rw = r_minus * wv.cast<cplx>().asDiagonal();
      z1[k] = rw * r_minus;
      z2[k] = -(rw * rw) * r_pert;
      const Eigen::MatrixXcd left = (wsqrt.cast<cplx>().asDiagonal() * r_plus).adjoint();
      const Eigen::MatrixXcd right = wsqrt.cast<cplx>().asDiagonal() * r_minus;
      const Eigen::MatrixXcd factored = left * wsgn.cast<cplx>().asDiagonal() * right;
      f_num += (z1[k] - factored).squaredNorm();
      f_den += z1[k].squaredNorm();
      const Eigen::MatrixXcd diff = r_minus - r_pert;
      d_num += (diff - z1[k] - z2[k]).squaredNorm();
      d_den += diff.squaredNorm();
      rw_norm = std::max(rw_norm, spectral_norm(rw));
      lvl.perturbed_resolvent_norm = std::max(lvl.perturbed_resolvent_norm, spectral_norm(r_pert));
      lvl.z2_norm = std::max(lvl.z2_norm, spectral_norm(z2[k]));
    }
    lvl.factorization_defect = f_den > 0.0 ? std::sqrt(f_num / f_den) : 0.0;
    lvl.decomposition_defect = d_den > 0.0 ? std::sqrt(d_num / d_den) : 0.0;
    lvl.z2_bound = rw_norm * rw_norm * lvl.perturbed_resolvent_norm;
    lvl.z1_singular_values = singular_values(z1[0], z1[1]);
    lvl.z2_singular_values = singular_values(z2[0], z2[1]);
    lvl.z1_partial_sums = partial_sums(lvl.z1_singular_values);
    lvl.z2_partial_sums = partial_sums(lvl.z2_singular_values);
    rep.levels.push_back(std::move(lvl));
  }
  if (rep.levels.size() >= 2) {
    const auto& hi = rep.levels[rep.levels.size() - 1];
    const auto& lo = rep.levels[rep.levels.size() - 2];
    rep.z1_stability = stability(lo.z1_partial_sums, hi.z1_partial_sums);
    rep.z2_stability = stability(lo.z2_partial_sums, hi.z2_partial_sums);
  }
  return rep;
}

}  // namespace ts
