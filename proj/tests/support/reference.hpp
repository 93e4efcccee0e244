#pragma once
// Slow reference implementations used only by the tests. Everything here is
// plain long double series/quadrature sharing no code or tuning constants
// with the library, so agreement is meaningful.

#include <cmath>
#include <cstdlib>

namespace ref {

inline long double bessel_i(long double a, long double x) {
  long double t = std::exp(a * std::log(x / 2) - std::lgamma(a + 1));
  long double sum = t;
  const long double q = x * x / 4;
  for (int m = 0; m < 600; ++m) {
    t *= q / ((m + 1) * (m + 1 + a));
    sum += t;
    if (std::fabs(t) < 1e-22L * std::fabs(sum) && m > 4) break;
  }
  return sum;
}

inline long double kummer(long double a, long double b, long double z) {
  long double t = 1, sum = 1;
  for (int m = 0; m < 800; ++m) {
    t *= (a + m) / (b + m) * z / (m + 1);
    sum += t;
    if (std::fabs(t) < 1e-22L * std::fabs(sum) && m > 4) break;
  }
  return sum;
}

// cosh-kernel integral of K for real (cosh(a t)) or imaginary (cos(v t))
// order, trapezoid with its own step and cutoff
inline long double bessel_k(bool imaginary_order, long double v, long double x) {
  long double T = std::acosh(std::max<long double>(80 / x, 4));
  if (!imaginary_order)
    for (int it = 0; it < 8; ++it) T = std::acosh(std::max<long double>((80 + v * T) / x, 4));
  const int n = 20000;
  const long double h = T / n;
  long double sum = 0.5L * std::exp(-x);  // t = 0 endpoint
  for (int i = 1; i <= n; ++i) {
    const long double t = i * h;
    const long double kern = imaginary_order ? std::cos(v * t) : std::cosh(v * t);
    sum += std::exp(-x * std::cosh(t)) * kern;
  }
  return sum * h;
}

// Gamma-weighted combination of the two regular solutions; valid away from
// integer 2 nu
inline long double whittaker_w(long double mu, long double nu, long double z) {
  auto part = [&](long double s) {
    const long double m = kummer(0.5L + s * nu - mu, 1 + 2 * s * nu, z);
    const long double g = std::tgamma(-2 * s * nu) / std::tgamma(0.5L - s * nu - mu);
    return g * std::exp(-z / 2 + (0.5L + s * nu) * std::log(z)) * m;
  };
  return part(-1) + part(+1);
}

// first derivative, two-step Richardson on central differences
template <class F>
double diff1(const F& f, double x, double h) {
  auto d = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

// second derivative, same extrapolation
template <class F>
double diff2(const F& f, double x, double h) {
  auto d = [&](double hh) { return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh); };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

// Extrapolated second difference with a step sized against two error floors:
// fourth-order truncation, and value noise amplified by 1/h^2. Functions
// assembled from cancelling series carry noise that grows like e^z until the
// implementation switches representation at series_cap, so past z = 12 on
// the series side the step widens and two staggered estimates are averaged.
template <class F>
double ode_diff2(const F& f, double z, double series_cap) {
  if (z <= 3.0) return diff2(f, z, 2e-3 * z);
  if (z <= 12.0 || z > series_cap) return diff2(f, z, 0.08);
  return 0.5 * (diff2(f, z, 0.40) + diff2(f, z, 0.55));
}

// composite Simpson with an odd sample count
template <class F>
double simpson(const F& f, double a, double b, int samples) {
  const double h = (b - a) / (samples - 1);
  double s = f(a) + f(b);
  for (int i = 1; i < samples - 1; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace ref
