#include "thermalscatter/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "thermalscatter/error.hpp"

namespace ts::specfun {
namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double quarter_pi = pi / 4.0;
const cplx I{0.0, 1.0};

void require_finite(double x, const char* fn) {
  if (!std::isfinite(x)) throw DomainError(std::string(fn) + ": non-finite argument");
}

void require_finite(cplx z, const char* fn) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError(std::string(fn) + ": non-finite argument");
}

// c_k = prod_{j<=k} (2j-1)^2 / (k! 8^k), the Hankel coefficients of order 0 up to sign.
// The sums below stop at the smallest term or once it drops under the working precision.
struct AsymptoticSums {
  cplx plain;        // sum c_k / z^k
  cplx alternating;  // sum (-1)^k c_k / z^k
  double last_term;
};

AsymptoticSums hankel_sums(cplx z) {
  AsymptoticSums out{1.0, 1.0, 0.0};
  const cplx inv = 1.0 / z;
  cplx power = 1.0;
  double c = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    c *= odd * odd / (8.0 * k);
    power *= inv;
    const cplx term = c * power;
    const double mag = std::abs(term);
    if (mag > prev) break;
    out.plain += term;
    out.alternating += (k % 2 == 0) ? term : -term;
    out.last_term = mag;
    prev = mag;
    if (mag < 0.01 * eps) break;
  }
  return out;
}

cplx i0_from_sums(cplx z, const AsymptoticSums& s, bool scaled) {
  const cplx pre = 1.0 / std::sqrt(2.0 * pi * z);
  const double sgn = z.imag() >= 0.0 ? 1.0 : -1.0;
  // e^{z} is always the dominant exponential once Re z >= 0.
  const cplx lead = scaled ? std::exp(cplx(0.0, z.imag())) : std::exp(z);
  const cplx sub = scaled ? std::exp(-z - z.real()) : std::exp(-z);
  cplx value = lead * pre * s.plain;
  if (z.imag() != 0.0) value += sgn * I * sub * pre * s.alternating;
  return value;
}

}  // namespace

namespace branch {

SpecialValue j0_series(double x) {
  const double a = -x * x / 4.0;
  double term = 1.0, sum = 1.0, mag = 1.0;
  for (int k = 1; k < 300; ++k) {
    term *= a / (static_cast<double>(k) * k);
    sum += term;
    mag += std::abs(term);
    if (std::abs(term) < 1e-3 * eps * std::max(1.0, std::abs(sum))) break;
  }
  return {sum, 4.0 * eps * mag + std::abs(term)};
}

SpecialValue j0_integral(double x) {
  // Periodic trapezoid rule for (1/2pi) int_0^{2pi} cos(x sin t) dt; geometric convergence once n > |x|.
  const int n = 2 * static_cast<int>(std::ceil((std::abs(x) + 40.0) / 2.0));
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += std::cos(x * std::sin(2.0 * pi * k / n));
  return {sum / n, 8.0 * eps};
}

SpecialValue j0_asymptotic(double x) {
  const double ax = std::abs(x);
  double p = 1.0, q = 0.0, c = 1.0, power = 1.0, prev = 1.0, last = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    c *= odd * odd / (8.0 * k);
    power /= ax;
    const double term = c * power;
    if (term > prev) break;
    // P collects even orders with alternating sign, Q the odd ones starting negative.
    if (k % 2 == 0)
      p += ((k / 2) % 2 == 0) ? term : -term;
    else
      q += (((k + 1) / 2) % 2 == 0) ? term : -term;
    last = term;
    prev = term;
    if (term < 0.01 * eps) break;
  }
  const double chi = ax - quarter_pi;
  const double amp = std::sqrt(2.0 / (pi * ax));
  return {amp * (p * std::cos(chi) - q * std::sin(chi)), amp * (last + 4.0 * eps * (1.0 + ax * eps))};
}

ComplexSpecialValue i0_series(cplx z) {
  const cplx q = z * z / 4.0;
  cplx term = 1.0, sum = 1.0;
  double mag = 1.0;
  for (int k = 1; k < 300; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    mag += std::abs(term);
    if (std::abs(term) < 1e-3 * eps * std::max(1.0, std::abs(sum))) break;
  }
  return {sum, 4.0 * eps * mag + std::abs(term)};
}

ComplexSpecialValue i0_integral(cplx z) {
  if (z.real() < 0.0) z = -z;
  const int n = 2 * static_cast<int>(std::ceil((1.5 * std::abs(z) + 30.0) / 2.0));
  cplx sum = 0.0;
  for (int k = 0; k < n; ++k) sum += std::exp(z * std::cos(2.0 * pi * k / n));
  return {sum / static_cast<double>(n), 8.0 * eps * std::exp(z.real())};
}

ComplexSpecialValue i0_asymptotic(cplx z) {
  if (z.real() < 0.0) z = -z;
  const AsymptoticSums s = hankel_sums(z);
  const cplx value = i0_from_sums(z, s, false);
  return {value, std::abs(value) * (s.last_term + 8.0 * eps)};
}

ComplexSpecialValue k0_series(cplx z) {
  const cplx q = z * z / 4.0;
  const cplx lead = -(std::log(z / 2.0) + euler_gamma);
  cplx term = 1.0, i0 = 1.0, tail = 0.0;
  double harmonic = 0.0, mag = 1.0;
  for (int k = 1; k < 300; ++k) {
    term *= q / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    i0 += term;
    tail += harmonic * term;
    mag += std::abs(term) * (1.0 + harmonic);
    if (std::abs(term) * (1.0 + harmonic) < 1e-3 * eps * std::max(1.0, std::abs(i0))) break;
  }
  const cplx value = lead * i0 + tail;
  return {value, 4.0 * eps * mag * (1.0 + std::abs(lead))};
}

ComplexSpecialValue k0_integral(cplx z) {
  // K0(z) = sqrt(pi/2z) e^{-z} pi^{-1/2} int_R e^{-v^2} (1 + v^2/2z)^{-1/2} dv, trapezoid in v.
  constexpr double h = 0.2;
  constexpr int half = 36;
  const cplx inv2z = 1.0 / (2.0 * z);
  cplx sum = 1.0;
  for (int k = 1; k <= half; ++k) {
    const double v2 = (k * h) * (k * h);
    sum += 2.0 * std::exp(-v2) / std::sqrt(1.0 + v2 * inv2z);
  }
  const cplx scaled = std::sqrt(pi / (2.0 * z)) * sum * h / std::sqrt(pi);
  const cplx value = scaled * std::exp(-z);
  return {value, 16.0 * eps * std::abs(value)};
}

ComplexSpecialValue k0_asymptotic(cplx z) {
  const AsymptoticSums s = hankel_sums(z);
  const cplx value = std::sqrt(pi / (2.0 * z)) * std::exp(-z) * s.alternating;
  return {value, std::abs(value) * (s.last_term + 8.0 * eps)};
}

SpecialValue kelvin_series(Kelvin which, double s) {
  if (s == 0.0) {
    switch (which) {
      case Kelvin::ber: return {1.0, 0.0};
      case Kelvin::bei: return {0.0, 0.0};
      case Kelvin::kei: return {-quarter_pi, 0.0};
      case Kelvin::ker: throw PoleError("ker: logarithmic pole at 0");
    }
  }
  const double a = s * s / 4.0;
  // Terms a^m/(m!)^2 with m = 2k (ber family) and m = 2k+1 (bei family).
  double term = 1.0, psi = -euler_gamma;
  double ber = 0.0, bei = 0.0, ker_tail = 0.0, kei_tail = 0.0, mag = 0.0;
  for (int m = 0; m < 400; ++m) {
    if (m > 0) {
      term *= a / (static_cast<double>(m) * m);
      psi += 1.0 / m;
    }
    const int k = m / 2;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    if (m % 2 == 0) {
      ber += sign * term;
      ker_tail += sign * psi * term;
    } else {
      bei += sign * term;
      kei_tail += sign * psi * term;
    }
    mag += term * (1.0 + std::abs(psi));
    if (m > 2 && term * (1.0 + std::abs(psi)) < 1e-3 * eps) break;
  }
  const double lg = std::log(s / 2.0);
  const double err = 4.0 * eps * mag * (1.0 + std::abs(lg));
  switch (which) {
    case Kelvin::ber: return {ber, err};
    case Kelvin::bei: return {bei, err};
    case Kelvin::ker: return {-lg * ber + quarter_pi * bei + ker_tail, err};
    case Kelvin::kei: return {-lg * bei - quarter_pi * ber + kei_tail, err};
  }
  return {0.0, 0.0};
}

SpecialValue kelvin_ray(Kelvin which, double s) {
  const cplx z = std::polar(s, quarter_pi);
  const bool far = s >= asymptotic_switch;
  if (which == Kelvin::ber || which == Kelvin::bei) {
    const ComplexSpecialValue v = far ? i0_asymptotic(z) : i0_integral(z);
    return {which == Kelvin::ber ? v.value.real() : v.value.imag(), v.est_abs_error};
  }
  const ComplexSpecialValue v = far ? k0_asymptotic(z) : k0_integral(z);
  return {which == Kelvin::ker ? v.value.real() : v.value.imag(), v.est_abs_error};
}

}  // namespace branch

SpecialValue bessel_j0_eval(double x) {
  require_finite(x, "bessel_j0");
  const double ax = std::abs(x);
  if (ax < series_switch) return branch::j0_series(ax);
  if (ax < asymptotic_switch) return branch::j0_integral(ax);
  return branch::j0_asymptotic(ax);
}

double bessel_j0(double x) { return bessel_j0_eval(x).value; }

ComplexSpecialValue bessel_i0_eval(cplx z) {
  require_finite(z, "bessel_i0");
  const double r = std::abs(z);
  if (r < series_switch) return branch::i0_series(z);
  if (r < asymptotic_switch) return branch::i0_integral(z);
  return branch::i0_asymptotic(z);
}

ComplexSpecialValue bessel_k0_eval(cplx z) {
  require_finite(z, "bessel_k0");
  if (z == cplx(0.0, 0.0)) throw PoleError("K0: logarithmic pole at 0");
  if (z.real() < 0.0) {
    // K0(w e^{m pi i}) = K0(w) - m pi i I0(w) with w = -z, m = +1 above the cut, -1 below.
    const double m = std::signbit(z.imag()) ? -1.0 : 1.0;
    const ComplexSpecialValue k = bessel_k0_eval(-z);
    const ComplexSpecialValue i = bessel_i0_eval(-z);
    return {k.value - m * pi * I * i.value, k.est_abs_error + pi * i.est_abs_error};
  }
  const double r = std::abs(z);
  if (r < series_switch) return branch::k0_series(z);
  if (r < asymptotic_switch) return branch::k0_integral(z);
  return branch::k0_asymptotic(z);
}

cplx bessel_i0(cplx z) { return bessel_i0_eval(z).value; }
cplx bessel_k0(cplx z) { return bessel_k0_eval(z).value; }

cplx bessel_i0_scaled(cplx z) {
  require_finite(z, "bessel_i0_scaled");
  if (std::abs(z) < asymptotic_switch) return bessel_i0(z) * std::exp(-std::abs(z.real()));
  if (z.real() < 0.0) z = -z;
  return i0_from_sums(z, hankel_sums(z), true);
}

cplx bessel_k0_scaled(cplx z) {
  require_finite(z, "bessel_k0_scaled");
  if (z.real() < 0.0) throw DomainError("bessel_k0_scaled: requires Re z >= 0");
  if (z == cplx(0.0, 0.0)) throw PoleError("K0: logarithmic pole at 0");
  if (std::abs(z) < asymptotic_switch) return bessel_k0(z) * std::exp(z);
  return std::sqrt(pi / (2.0 * z)) * hankel_sums(z).alternating;
}

SpecialValue kelvin_eval(Kelvin which, double s) {
  require_finite(s, "kelvin");
  if (s < 0.0) throw DomainError("kelvin: negative argument");
  if (s <= series_switch) return branch::kelvin_series(which, s);
  return branch::kelvin_ray(which, s);
}

double kelvin(Kelvin which, double s) { return kelvin_eval(which, s).value; }

double amplitude_m0(double s) {
  require_finite(s, "amplitude_m0");
  if (s < 0.0) throw DomainError("amplitude_m0: negative argument");
  if (s <= series_switch) return std::hypot(kelvin(Kelvin::ber, s), kelvin(Kelvin::bei, s));
  return std::abs(bessel_i0(std::polar(s, quarter_pi)));
}

double amplitude_n0(double s) {
  require_finite(s, "amplitude_n0");
  if (s < 0.0) throw DomainError("amplitude_n0: negative argument");
  if (s == 0.0) throw PoleError("amplitude_n0: logarithmic pole at 0");
  if (s <= series_switch) return std::hypot(kelvin(Kelvin::ker, s), kelvin(Kelvin::kei, s));
  return std::abs(bessel_k0(std::polar(s, quarter_pi)));
}

double amplitude_m0_scaled(double s) {
  if (s < 0.0 || !std::isfinite(s)) throw DomainError("amplitude_m0_scaled: invalid argument");
  if (s < asymptotic_switch) return amplitude_m0(s) * std::exp(-s / std::sqrt(2.0));
  return std::abs(bessel_i0_scaled(std::polar(s, quarter_pi)));
}

double amplitude_n0_scaled(double s) {
  if (s < 0.0 || !std::isfinite(s)) throw DomainError("amplitude_n0_scaled: invalid argument");
  if (s == 0.0) throw PoleError("amplitude_n0_scaled: logarithmic pole at 0");
  if (s < asymptotic_switch) return amplitude_n0(s) * std::exp(s / std::sqrt(2.0));
  return std::abs(bessel_k0_scaled(std::polar(s, quarter_pi)));
}

SpecialValue gamma_eval(double x) {
  require_finite(x, "gamma_fn");
  if (x <= 0.0) throw DomainError("gamma_fn: requires x > 0");
  const double v = std::tgamma(x);
  return {v, 4.0 * eps * std::abs(v)};
}

double gamma_fn(double x) { return gamma_eval(x).value; }

ComplexSpecialValue modified_bessel_ray_eval(RayFunction which, double r, double phase) {
  require_finite(r, "modified_bessel_ray");
  require_finite(phase, "modified_bessel_ray");
  if (r < 0.0) throw DomainError("modified_bessel_ray: negative radius");
  if (!(phase > -pi && phase < pi)) throw DomainError("modified_bessel_ray: phase outside (-pi, pi)");
  const cplx z = std::polar(r, phase);
  if (which == RayFunction::I0) return bessel_i0_eval(z);
  if (r == 0.0) throw PoleError("K0: logarithmic pole at 0");
  // Keep the branch of the principal argument when Re z < 0 and Im z rounds to 0.
  if (z.real() < 0.0 && z.imag() == 0.0) return bessel_k0_eval(cplx(z.real(), phase > 0 ? 0.0 : -0.0));
  return bessel_k0_eval(z);
}

cplx modified_bessel_ray(RayFunction which, double r, double phase) {
  return modified_bessel_ray_eval(which, r, phase).value;
}

}  // namespace ts::specfun
