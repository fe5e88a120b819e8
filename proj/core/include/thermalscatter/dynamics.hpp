#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "thermalscatter/grid.hpp"
#include "thermalscatter/perturbation.hpp"

namespace ts {

// e^{-iTt} f = S (e^{iyt} (S f)), with S the unitary involution of ThermalOperator::apply_S.
SampledFunction free_propagate(double t, const SampledFunction& f);

// Strang splitting with n_steps steps of e^{-iW dt/2} free_propagate(dt) e^{-iW dt/2}.
// For the zero potential the half-step factors are skipped, so the result is the
// free propagation with identical phase factors.
SampledFunction perturbed_propagate(double t, const SampledFunction& f, const PotentialSpec& w, int n_steps);

struct Schedule {
  std::vector<double> times;
  double tolerance = 1e-3;

  // t0, 2 t0, 4 t0, ... up to t1.
  static Schedule geometric(double t0, double t1, double tolerance = 1e-3);
};

struct TracePoint {
  double t;
  double increment;
};

struct ModelOptions {
  // The potential part is integrated on [-factor * cutoff, factor * cutoff] ...
  double potential_cutoff_factor = 10.0;
  // ... with factor * n_per_side nodes per side.
  int potential_nodes_factor = 2;
  // Mass of the B-picture state beyond this fraction of the cutoff counts as leakage.
  double leakage_fraction = 0.95;
  double leakage_threshold = 1e-6;
};

// T + W in the B-picture, where T acts as multiplication by -y and W becomes the
// dense operator S W S. Each B-picture half-line is an invariant subspace:
// y < 0 sees W on x > 0, y > 0 sees W on x < 0. The matrix elements of S W S are
// integrated on an extended grid so that states whose x-space image has left
// [-cutoff, cutoff] still feel the potential.
// Vectors are in weighted coordinates sqrt(w) g, laid out like the grid.
class ScatteringModel {
 public:
  ScatteringModel(GridPtr grid, PotentialSpec w, ModelOptions options = {});

  const GridPtr& grid() const { return grid_; }
  const PotentialSpec& potential() const { return w_; }
  const ModelOptions& options() const { return options_; }

  // x-space function <-> weighted B-picture vector.
  Eigen::VectorXcd to_model(const SampledFunction& f) const;
  SampledFunction from_model(const Eigen::VectorXcd& g) const;

  Eigen::VectorXcd apply_h0(const Eigen::VectorXcd& g) const;
  Eigen::VectorXcd apply_h(const Eigen::VectorXcd& g) const;
  // e^{iHt} e^{-iH0 t} g.
  Eigen::VectorXcd wave_step(double t, const Eigen::VectorXcd& g) const;
  // e^{-iHt} g.
  Eigen::VectorXcd evolve(double t, const Eigen::VectorXcd& g) const;
  // Squared mass beyond leakage_fraction * cutoff.
  double boundary_mass(const Eigen::VectorXcd& g) const;

 private:
  struct Half {
    int side;  // +1: y > 0, -1: y < 0
    Eigen::VectorXd h0;
    Eigen::MatrixXd v;
    Eigen::VectorXd lambda;
    Eigen::MatrixXd u;
  };

  Eigen::VectorXcd half_of(const Eigen::VectorXcd& g, int side) const;
  void set_half(Eigen::VectorXcd& g, int side, const Eigen::VectorXcd& h) const;

  GridPtr grid_;
  PotentialSpec w_;
  ModelOptions options_;
  bool zero_;
  Half halves_[2];
};

struct WaveResult {
  SampledFunction value;
  std::vector<TracePoint> trace;
  bool converged;
  double converged_time;
  double boundary_mass;
  bool leakage_warning;
};

// Omega_+- f = lim e^{i(T+W)t} e^{-iTt} f as t -> -+inf (sign = +1 takes t -> -inf).
// Throws PreconditionError unless W and |W|^{1/2} are both HS-eligible.
WaveResult wave_operator_apply(int sign, const PotentialSpec& w, const SampledFunction& f, const Schedule& schedule,
                               const ModelOptions& options = {});

struct ScatteringReport {
  int basis_size = 0;
  Eigen::MatrixXcd omega_plus;   // <f_j, Omega_+ f_k>
  Eigen::MatrixXcd omega_minus;  // <f_j, Omega_- f_k>
  Eigen::MatrixXcd s_matrix;     // <Omega_- f_j, Omega_+ f_k>
  double unitarity_defect = 0.0;      // ||S* S - 1||_2
  double isometry_defect = 0.0;       // max over signs of ||G - 1||_2, G the Gram matrix of Omega f_k
  double intertwining_defect = 0.0;   // max_k ||H Omega g_k - Omega H0 g_k|| / ||H0 g_k||
  std::vector<TracePoint> convergence_trace;  // max of both signs at each time
  std::vector<TracePoint> trace_plus, trace_minus;
  bool converged = false;
  double time_plus = 0.0, time_minus = 0.0;
  double boundary_mass = 0.0;
  bool leakage_warning = false;
};

// Basis must be orthonormal to 1e-8 (ContractError otherwise).
ScatteringReport scattering_matrix(const PotentialSpec& w, const std::vector<SampledFunction>& basis,
                                   const Schedule& schedule = Schedule::geometric(1.0, 256.0),
                                   const ModelOptions& options = {});

// count Hermite-Gauss packets in the B-picture (half on y > 0 centred at +centre, half on
// y < 0 at -centre, width sigma), orthonormalized, returned in x-space as S g.
// centre <= 0 selects 0.3 * cutoff.
std::vector<SampledFunction> hermite_basis(const GridPtr& grid, int count, double centre = 0.0, double sigma = 1.0);

// Parses "hermite:N".
std::vector<SampledFunction> make_basis(const GridPtr& grid, const std::string& descriptor);
// Parses "geom:t0:t1".
Schedule parse_schedule(const std::string& descriptor, double tolerance = 1e-3);

struct KbLevel {
  double cutoff;
  int n_per_side;
  std::vector<double> z1_singular_values;  // descending
  std::vector<double> z2_singular_values;
  std::vector<std::pair<int, double>> z1_partial_sums;  // (K, sum of the K largest)
  std::vector<std::pair<int, double>> z2_partial_sums;
  double factorization_defect;  // ||Z1 - (W'R_i)* sgn W (W'R_{-i})||_F / ||Z1||_F
  double decomposition_defect;  // ||R(T) - R(T+W) - Z1 - Z2||_F / ||R(T) - R(T+W)||_F
  double z2_norm;
  double z2_bound;              // ||R_{-i} W||^2 ||R_{-i}(T+W)||
  double perturbed_resolvent_norm;
};

struct KbReport {
  std::vector<KbLevel> levels;
  // max over the partial-sum cutoffs of the relative change between the two largest grids.
  double z1_stability;
  double z2_stability;
};

// Z1 = R_{-i}(T) W R_{-i}(T), Z2 = -[R_{-i}(T) W]^2 R_{-i}(T+W) on each grid of the ladder.
KbReport resolvent_difference_diagnostics(const PotentialSpec& w, const std::vector<std::pair<double, int>>& grids,
                                          double grading_exponent = 2.0);

}  // namespace ts
