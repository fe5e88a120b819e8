#pragma once

#include <complex>

namespace ts::specfun {

using cplx = std::complex<double>;

struct SpecialValue {
  double value;
  double est_abs_error;
};

struct ComplexSpecialValue {
  cplx value;
  double est_abs_error;
};

enum class Kelvin { ber, bei, ker, kei };
enum class RayFunction { I0, K0 };

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;
inline constexpr double pi = 3.14159265358979323846264338327950288;

// Accuracy target: |error| <= accuracy_target * max(1, |value|) for |argument| <= 50.
inline constexpr double accuracy_target = 1e-12;

// Ascending series below series_switch, integral representations up to
// asymptotic_switch, asymptotic expansions beyond.
inline constexpr double series_switch = 8.0;
inline constexpr double asymptotic_switch = 20.0;

SpecialValue bessel_j0_eval(double x);
double bessel_j0(double x);

SpecialValue kelvin_eval(Kelvin which, double s);
double kelvin(Kelvin which, double s);

// M0 = sqrt(ber^2 + bei^2), N0 = sqrt(ker^2 + kei^2).
double amplitude_m0(double s);
double amplitude_n0(double s);
// Exponentially rescaled amplitudes: M0(s) e^{-s/sqrt2} and N0(s) e^{s/sqrt2}.
// Finite for every s where the unscaled values would overflow or underflow.
double amplitude_m0_scaled(double s);
double amplitude_n0_scaled(double s);

SpecialValue gamma_eval(double x);
double gamma_fn(double x);

ComplexSpecialValue bessel_i0_eval(cplx z);
ComplexSpecialValue bessel_k0_eval(cplx z);
cplx bessel_i0(cplx z);
cplx bessel_k0(cplx z);

// I0(z) e^{-|Re z|} and K0(z) e^{z}; the K0 form requires |ph z| <= pi/2.
cplx bessel_i0_scaled(cplx z);
cplx bessel_k0_scaled(cplx z);

// z = r e^{i phase}, phase in (-pi, pi).
ComplexSpecialValue modified_bessel_ray_eval(RayFunction which, double r, double phase);
cplx modified_bessel_ray(RayFunction which, double r, double phase);

// Individual evaluation routes, exposed for switch-agreement tests.
namespace branch {
SpecialValue j0_series(double x);
SpecialValue j0_integral(double x);
SpecialValue j0_asymptotic(double x);
ComplexSpecialValue i0_series(cplx z);
ComplexSpecialValue i0_integral(cplx z);
ComplexSpecialValue i0_asymptotic(cplx z);
// K0 routes are valid for |ph z| <= pi/2.
ComplexSpecialValue k0_series(cplx z);
ComplexSpecialValue k0_integral(cplx z);
ComplexSpecialValue k0_asymptotic(cplx z);
SpecialValue kelvin_series(Kelvin which, double s);
// Kelvin values through I0/K0 on the ray s e^{i pi/4} (integral or asymptotic route).
SpecialValue kelvin_ray(Kelvin which, double s);
}  // namespace branch

}  // namespace ts::specfun
