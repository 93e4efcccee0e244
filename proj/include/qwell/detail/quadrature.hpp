#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace qwell::detail {

// Compensated accumulator for long alternating-ish sums.
struct kahan_sum {
  double s{0.0};
  double c{0.0};
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

// K_a(x) and dK_a/dx through the cosh-kernel integral
//   K = Int_0^inf exp(-x cosh t) w(t) dt,   w = cos(nu_t t) | cosh(a t),
// truncated where the kernel falls 20 decades below exp(-x). The integrand
// extends evenly in t, so the trapezoid rule converges like exp(-c/h).
struct bessel_k_quad_result {
  double value;
  double derivative;
};

inline bessel_k_quad_result bessel_k_quadrature(bool imaginary_order, double ord, double x) {
  double big = std::acosh(std::max(46.0 / x, 4.0));
  if (!imaginary_order) {
    // cosh(a t) grows; push the cutoff until the kernel dominates again
    while (x * std::cosh(big) - std::fabs(ord) * big < 46.0) big += 0.5;
  }
  const double h_target = 0.05;
  const int n = static_cast<int>(std::ceil(big / h_target));
  const double h = big / n;
  kahan_sum val, der;
  for (int i = 0; i <= n; ++i) {
    const double t = i * h;
    const double ch = std::cosh(t);
    const double kernel = std::exp(-x * ch);
    const double w = imaginary_order ? std::cos(ord * t) : std::cosh(ord * t);
    const double f = kernel * w;
    const double weight = (i == 0 || i == n) ? 0.5 : 1.0;
    val.add(weight * f);
    der.add(weight * (-ch * f));
  }
  return {val.s * h, der.s * h};
}

// log of J = Int_0^inf t^(c-1) (1+t/z)^q exp(-t) dt for c > 0, via the
// doubly-exponential substitution t = exp(2 sinh s). The integrand is
// assembled in logs so the (1+t/z)^q factor cannot overflow mid-range.
inline double whittaker_tail_integral_log(double c, double q, double z) {
  const double h = 0.08;
  const double s_max = 4.6;
  const int n = static_cast<int>(std::ceil(2.0 * s_max / h));
  std::vector<double> lg(n + 1);
  double lg_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double s = -s_max + i * (2.0 * s_max / n);
    const double lt = 2.0 * std::sinh(s);
    const double t = std::exp(lt);
    // t^(c-1) dt = t^c * 2 cosh(s) ds
    const double v = c * lt + q * std::log1p(t / z) - t + std::log(2.0 * std::cosh(s));
    lg[i] = v;
    lg_max = std::max(lg_max, v);
  }
  kahan_sum acc;
  for (int i = 0; i <= n; ++i) {
    const double weight = (i == 0 || i == n) ? 0.5 : 1.0;
    acc.add(weight * std::exp(lg[i] - lg_max));
  }
  return lg_max + std::log(acc.s * (2.0 * s_max / n));
}

}  // namespace qwell::detail
