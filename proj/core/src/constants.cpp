#include "thermalscatter/constants.hpp"

#include <cmath>
#include <numbers>

#include "thermalscatter/specfun.hpp"

namespace ts::constants {

Maximum maximize(const std::function<double(double)>& f, double lo, double hi, int points_per_decade) {
  const double decades = std::log10(hi / lo);
  const int n = std::max(3, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);
  const double step = decades / (n - 1);
  auto at = [&](int i) { return i == n - 1 ? hi : lo * std::pow(10.0, step * i); };

  int best = 0;
  double best_value = f(at(0));
  for (int i = 1; i < n; ++i) {
    const double v = f(at(i));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = at(std::max(0, best - 1));
  double b = at(std::min(n - 1, best + 1));

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  Maximum refined{0.5 * (a + b), f(0.5 * (a + b))};
  if (best_value > refined.value) refined = {at(best), best_value};
  return refined;
}

double c_hat_from_m(double m) { return std::numbers::sqrt2 * std::numbers::pi * m * m; }

double k_hat_from_m(double m) {
  return std::pow(2.0, 1.25) * std::sqrt(std::numbers::pi) * std::pow(3.0, -0.375) * m;
}

ConstantsReport estimate_constants(int points_per_decade) {
  using namespace specfun;
  ConstantsReport r{};
  r.points_per_decade = points_per_decade;

  r.m_window = maximize([](double z) { return std::abs(bessel_j0(z)) * std::sqrt(z); }, 1e-3, 200.0,
                        points_per_decade);
  r.m_limit = std::sqrt(2.0 / std::numbers::pi);
  r.m = std::max(r.m_window.value, r.m_limit) * (1.0 + margin);

  r.cm_window = maximize(
      [](double s) {
        const double v = amplitude_m0_scaled(s);
        return s * v * v;
      },
      1e-4, 100.0, points_per_decade);
  r.cm_limit = 1.0 / (2.0 * std::numbers::pi);
  r.c_m = std::max(r.cm_window.value, r.cm_limit) * (1.0 + margin);

  r.cn_window = maximize(
      [](double s) {
        const double v = amplitude_n0_scaled(s);
        return s * v * v;
      },
      1e-4, 100.0, points_per_decade);
  r.cn_limit = std::numbers::pi / 2.0;
  r.c_n = std::max(r.cn_window.value, r.cn_limit) * (1.0 + margin);

  r.c_hat = c_hat_from_m(r.m);
  r.k_hat = k_hat_from_m(r.m);
  return r;
}

}  // namespace ts::constants
