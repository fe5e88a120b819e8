#pragma once

#include <functional>

namespace ts::constants {

// Relative safety margin applied on top of a numerically established supremum.
inline constexpr double margin = 1e-6;

struct Maximum {
  double argmax;
  double value;
};

// Dense log-spaced scan of f over [lo, hi] followed by golden-section refinement
// around the best sample.
Maximum maximize(const std::function<double(double)>& f, double lo, double hi, int points_per_decade);

struct ConstantsReport {
  int points_per_decade;
  // |J0(z)| sqrt(z) on (0, 200]; the envelope tends to sqrt(2/pi) from below.
  Maximum m_window;
  double m_limit;
  double m;
  // s M0(s)^2 e^{-sqrt2 s} on (0, 100]; interior maximum, limit 1/(2 pi).
  Maximum cm_window;
  double cm_limit;
  double c_m;
  // s N0(s)^2 e^{sqrt2 s} on (0, 100]; increasing towards pi/2.
  Maximum cn_window;
  double cn_limit;
  double c_n;
  // sqrt2 pi M^2, the constant of the |x|^{1/4} relative bound.
  double c_hat;
  // 2^{5/4} sqrt(pi) 3^{-3/8} M, the decay constant.
  double k_hat;
};

ConstantsReport estimate_constants(int points_per_decade = 2000);

// Values produced by estimate_constants() at the default resolution, frozen for reuse.
namespace frozen {
inline constexpr double m = 0.79788535868742616;
inline constexpr double c_m = 0.26230624396741037;
inline constexpr double c_n = 1.5707978975912231;
inline constexpr double c_hat = 2.8284327816032682;
inline constexpr double k_hat = 2.2278320945861227;
}  // namespace frozen

double c_hat_from_m(double m);
double k_hat_from_m(double m);

}  // namespace ts::constants
