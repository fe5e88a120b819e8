#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "thermalscatter/grid.hpp"

namespace ts {

// Absolute slack on inequality margins.
inline constexpr double domain_slack = 1e-6;

// Seeded generator whose output does not depend on the standard library's distributions.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed);
  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  int integer(int lo, int hi);  // inclusive

 private:
  std::mt19937_64 engine_;
};

struct HolderConstants {
  double k;
  double c_k;  // (2/sqrt pi) Gamma((k+1)/2) / Gamma((k+2)/2)
  double i_k;  // 2 / ((1+k)^{(1+k)/2} (1-k)^{(1-k)/2})
  double g_k;  // C_k^2 I_k pi / cos(k pi/2)
};

// Throws DomainError unless 0 <= k < 1.
HolderConstants holder_constants(double k);
// q_k(v) = pi / (v^{1-k} cos(k pi/2)) = int |s|^k / (s^2 + v^2) ds.
double q_k(double k, double v);

struct DomainNorms {
  double psi_l2;
  double t_psi_l2;
  double b_psi_l1;
  double psi_linf;
};

struct DomainSample {
  std::uint64_t seed;
  SampledFunction phi;    // B-picture profile
  SampledFunction psi;    // B phi
  SampledFunction t_psi;  // -B(x phi)
  DomainNorms norms;
};

// phi is a sum of 1 to 5 Gaussians with random complex amplitudes, centres within
// 0.35 of the half cutoff, and widths sigma >= sqrt(max(1, 2|c|)) so that psi = B phi
// decays well inside the cutoff.
DomainSample make_domain_sample(const GridPtr& grid, std::uint64_t seed);
// Builds the sample from a caller-chosen profile.
DomainSample make_domain_sample_from(const SampledFunction& phi, std::uint64_t seed = 0);

struct LinfCheck {
  double margin;       // 2 pi ||T psi|| ||psi|| - ||psi||_inf^2
  double weak_margin;  // sqrt(pi)(||T psi|| + ||psi||) - ||psi||_inf
};

// 2 pi ||T psi|| ||psi|| - ||B psi||_1^2.
double check_l1(const DomainSample& s);
LinfCheck check_linf(const DomainSample& s);

struct HolderCheck {
  HolderConstants constants;
  double worst_ratio;
  int pairs;
};

// Pairs are drawn on one side of 0 and at least two local node spacings apart.
HolderCheck check_holder(const DomainSample& s, double k, int pair_count, std::uint64_t pair_seed = 0);

// max |psi(x)| |x|^{1/4} / (||T psi||^{1/4} ||psi||^{3/4}); compare with constants::frozen::k_hat.
double check_decay(const DomainSample& s);

struct OneSidedLimits {
  cplx plus;
  cplx minus;
  double est_error;  // spread between the 3- and 4-point extrapolants
};

// Limits of f at 0 from either side, by polynomial extrapolation through the four nodes nearest 0.
OneSidedLimits discontinuity_probe(const SampledFunction& f);
OneSidedLimits discontinuity_probe(const DomainSample& s);

}  // namespace ts
