#pragma once

#include <cmath>
#include <complex>

#include "qwell/detail/signed_log.hpp"

namespace qwell::detail {

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double log_two_pi = 1.83787706640934548356065947281123527;

// Lanczos approximation, g = 7, 9 coefficients.
inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_c[9] = {
    0.99999999999980993,    676.5203681218851,      -1259.1392167224028,
    771.32342877765313,     -176.61502916214059,    12.507343278686905,
    -0.13857109526572012,   9.9843695780195716e-6,  1.5056327351493116e-7,
};

// log Gamma(x) for x >= 0.5.
inline double lgamma_pos(double x) {
  const double z = x - 1.0;
  double s = lanczos_c[0];
  for (int i = 1; i < 9; ++i) s += lanczos_c[i] / (z + i);
  const double base = z + lanczos_g + 0.5;
  return 0.5 * log_two_pi + (z + 0.5) * std::log(base) - base + std::log(s);
}

// log|Gamma(x)| with sign over the real line. Poles (x a non-positive
// integer) come back as sign == 0 with log_abs == +inf, which models
// 1/Gamma -> 0 cleanly for the callers that divide by Gamma.
inline signed_log lgamma_signed(double x) {
  if (x >= 0.5) return {1, lgamma_pos(x)};
  if (x == std::floor(x)) return {0, std::numeric_limits<double>::infinity()};
  // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
  const double k = std::round(x);
  const double r = x - k;  // in [-0.5, 0.5], exact
  const double s = std::sin(pi * r);
  int sgn = s > 0.0 ? 1 : -1;
  if (std::fmod(std::fabs(k), 2.0) == 1.0) sgn = -sgn;
  const double log_abs = std::log(pi) - std::log(std::fabs(s)) - lgamma_pos(1.0 - x);
  return {sgn, log_abs};
}

// 1/Gamma as a signed log; total since Gamma has no zeros.
inline signed_log lgamma_signed_inv(double x) {
  const signed_log g = lgamma_signed(x);
  if (g.sign == 0) return {};  // pole of Gamma -> exact zero of 1/Gamma
  return {g.sign, -g.log_abs};
}

// Principal-branch log Gamma for Re(z) >= 0.5 (all this library needs).
inline std::complex<double> lgamma_complex(std::complex<double> zin) {
  const std::complex<double> z = zin - 1.0;
  std::complex<double> s = lanczos_c[0];
  for (int i = 1; i < 9; ++i) s += lanczos_c[i] / (z + static_cast<double>(i));
  const std::complex<double> base = z + (lanczos_g + 0.5);
  return 0.5 * log_two_pi + (z + 0.5) * std::log(base) - base + std::log(s);
}

}  // namespace qwell::detail
