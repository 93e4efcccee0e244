#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "qwell/detail/gamma.hpp"
#include "qwell/detail/quadrature.hpp"
#include "qwell/detail/signed_log.hpp"
#include "qwell/errors.hpp"

namespace qwell {

enum class OrderKind { Real, Imaginary };

// Order of a modified Bessel function: either a real order a, or a purely
// imaginary order i*value. K_{i v} = K_{-i v}, so the imaginary value is
// stored non-negative.
struct BesselOrder {
  OrderKind kind{OrderKind::Real};
  double value{0.0};

  BesselOrder() = default;
  BesselOrder(OrderKind k, double v) : kind(k), value(v) {
    if (!std::isfinite(v)) throw domain_error("BesselOrder: value must be finite");
    if (kind == OrderKind::Imaginary && value < 0.0) value = -value;
  }
  static BesselOrder real(double a) { return {OrderKind::Real, a}; }
  static BesselOrder imaginary(double v) { return {OrderKind::Imaginary, v}; }
};

// Whittaker indices. The attractive wells produce nu = sqrt(1/4 + u) >= 1/2
// and mu > 0; the extended family can push mu negative and nu below 1/2,
// so only finiteness and nu > 0 are enforced here.
struct WhittakerParams {
  double mu{0.0};
  double nu{0.5};

  WhittakerParams() = default;
  WhittakerParams(double mu_, double nu_) : mu(mu_), nu(nu_) {
    if (!std::isfinite(mu) || !std::isfinite(nu))
      throw domain_error("WhittakerParams: indices must be finite");
    if (nu <= 0.0) throw domain_error("WhittakerParams: nu must be > 0");
  }
};

struct LogGammaResult {
  double log_abs;  // ln |Gamma(x)|
  int sign;        // sign of Gamma(x)
};

inline LogGammaResult log_gamma(double x) {
  if (!std::isfinite(x)) throw domain_error("log_gamma: argument must be finite");
  if (x <= 0.0 && x == std::floor(x)) throw pole_error("log_gamma: pole at non-positive integer");
  const detail::signed_log g = detail::lgamma_signed(x);
  return {g.log_abs, g.sign};
}

namespace detail {

inline constexpr double series_rel_cut = 1e-17;
inline constexpr int series_term_cap = 500;

// Ascending series for I_a(x) and dI_a/dx, real order. The caller keeps
// a away from negative integers (those fold onto |a|).
struct i_series_result {
  double value;
  double derivative;
};

inline i_series_result bessel_i_series(double a, double x) {
  const signed_log inv_g = lgamma_signed_inv(a + 1.0);
  const double lx = std::log(0.5 * x);
  double t = inv_g.sign * std::exp(a * lx + inv_g.log_abs);
  const double q = 0.25 * x * x;
  kahan_sum sum, der;
  sum.add(t);
  der.add(t * (a / x));
  int quiet = 0;
  for (int m = 0; m < series_term_cap; ++m) {
    t *= q / ((m + 1.0) * (m + 1.0 + a));
    sum.add(t);
    der.add(t * ((2.0 * (m + 1) + a) / x));
    if (std::fabs(t) < series_rel_cut * std::fabs(sum.s)) {
      if (++quiet == 3) return {sum.s, der.s};
    } else {
      quiet = 0;
    }
  }
  throw convergence_error("bessel_I series hit the term cap");
}

// Same series with complex order (order = i*nu_t enters through here).
struct i_series_complex_result {
  std::complex<double> value;
  std::complex<double> derivative;
};

inline i_series_complex_result bessel_i_series_complex(std::complex<double> a, double x) {
  const std::complex<double> lg = lgamma_complex(a + 1.0);
  const double lx = std::log(0.5 * x);
  std::complex<double> t = std::exp(a * lx - lg);
  const double q = 0.25 * x * x;
  std::complex<double> sum = t;
  std::complex<double> der = t * (a / x);
  int quiet = 0;
  for (int m = 0; m < series_term_cap; ++m) {
    t *= q / ((m + 1.0) * (m + 1.0 + a));
    sum += t;
    der += t * ((2.0 * (m + 1) + a) / x);
    if (std::abs(t) < series_rel_cut * std::abs(sum)) {
      if (++quiet == 3) return {sum, der};
    } else {
      quiet = 0;
    }
  }
  throw convergence_error("complex-order Bessel series hit the term cap");
}

// The defining K combination (pi/2)(I_{-a} - I_a)/sin(a pi) evaluated fully
// in complex arithmetic for order a = i*nu_t, without exploiting conjugate
// symmetry. Exposed so tests can check the imaginary part really vanishes.
inline std::complex<double> bessel_k_complex_combination(double nu_t, double x) {
  const std::complex<double> a{0.0, nu_t};
  const std::complex<double> ip = bessel_i_series_complex(a, x).value;
  const std::complex<double> im = bessel_i_series_complex(-a, x).value;
  return 0.5 * pi * (im - ip) / std::sin(a * pi);
}

// Series route for the K pair: cancellation between I_{-a} and I_a costs
// about exp(2x) * eps relative accuracy, so this is only used for x <= 6;
// the quadrature route covers the rest (and x < 0.1 for imaginary order,
// where the complex phases churn hardest exactly as the levels accumulate).
inline constexpr double k_series_x_lo = 0.1;
inline constexpr double k_series_x_hi = 6.0;

}  // namespace detail

// Modified Bessel function of the first kind, real order.
inline double bessel_I(double order, double x) {
  if (!(x > 0.0)) throw domain_error("bessel_I: x must be > 0");
  if (!std::isfinite(order)) throw domain_error("bessel_I: order must be finite");
  if (order < 0.0 && order == std::floor(order)) order = -order;  // I_{-n} = I_n
  const double v = detail::bessel_i_series(order, x).value;
  if (!std::isfinite(v)) throw overflow_error("bessel_I: result not representable");
  return v;
}

struct BesselKPair {
  double value;       // K_order(x)
  double derivative;  // dK_order/dx
};

// K and dK/dx in one evaluation; real-valued for real and purely imaginary
// order alike.
inline BesselKPair bessel_K_pair(BesselOrder order, double x) {
  if (!(x > 0.0)) throw domain_error("bessel_K: x must be > 0");
  if (order.kind == OrderKind::Imaginary) {
    const double nt = order.value;
    if (nt == 0.0 || x < detail::k_series_x_lo || x > detail::k_series_x_hi) {
      const auto q = detail::bessel_k_quadrature(true, nt, x);
      return {q.value, q.derivative};
    }
    const auto s = detail::bessel_i_series_complex({0.0, nt}, x);
    const double inv_sh = 1.0 / std::sinh(detail::pi * nt);
    return {-detail::pi * s.value.imag() * inv_sh, -detail::pi * s.derivative.imag() * inv_sh};
  }
  const double a = std::fabs(order.value);  // K is even in its order
  const bool near_int = std::fabs(a - std::round(a)) < 0.05;
  if (near_int || x > detail::k_series_x_hi) {
    const auto q = detail::bessel_k_quadrature(false, a, x);
    return {q.value, q.derivative};
  }
  const auto ip = detail::bessel_i_series(a, x);
  const auto im = detail::bessel_i_series(-a, x);
  const double inv_s = 0.5 * detail::pi / std::sin(a * detail::pi);
  return {(im.value - ip.value) * inv_s, (im.derivative - ip.derivative) * inv_s};
}

inline double bessel_K(BesselOrder order, double x) { return bessel_K_pair(order, x).value; }

// Kummer's confluent hypergeometric 1F1(a; b; z).
inline double kummer_M(double a, double b, double z) {
  if (b <= 0.0 && b == std::floor(b)) throw pole_error("kummer_M: b at a non-positive integer");
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z))
    throw domain_error("kummer_M: arguments must be finite");
  detail::kahan_sum sum;
  double t = 1.0;
  sum.add(t);
  int quiet = 0;
  for (int m = 0; m < detail::series_term_cap; ++m) {
    t *= (a + m) / (b + m) * z / (m + 1.0);
    sum.add(t);
    if (std::fabs(t) < detail::series_rel_cut * std::fabs(sum.s)) {
      if (++quiet == 3) {
        if (!std::isfinite(sum.s)) throw overflow_error("kummer_M: result not representable");
        return sum.s;
      }
    } else {
      quiet = 0;
    }
  }
  throw convergence_error("kummer_M series hit the term cap");
}

namespace detail {

inline bool near_integer_2nu(double nu) {
  const double two_nu = 2.0 * nu;
  return std::fabs(two_nu - std::round(two_nu)) < 1e-6;
}

// Gamma-weighted sum of the two M solutions. Each term is returned in
// signed-log form so the near-cancellation at an eigenvalue stays measurable:
// the envelope is the larger term's magnitude.
inline scaled_real whittaker_w_series_scaled(double mu, double nu, double z) {
  const double lz = std::log(z);
  auto term = [&](double nn) -> scaled_real {
    const signed_log g_num = lgamma_signed(-2.0 * nn);
    const signed_log g_den_inv = lgamma_signed_inv(0.5 - nn - mu);
    if (g_num.sign == 0)
      throw degenerate_parameter_error("whittaker series at a Gamma pole; 2 nu integral");
    if (g_den_inv.sign == 0) return {};
    const double f = kummer_M(0.5 + nn - mu, 1.0 + 2.0 * nn, z);
    if (f == 0.0) return {};
    signed_log v;
    v.sign = g_num.sign * g_den_inv.sign * (f > 0.0 ? 1 : -1);
    v.log_abs = g_num.log_abs + g_den_inv.log_abs - 0.5 * z + (nn + 0.5) * lz +
                std::log(std::fabs(f));
    return sr_term(v);
  };
  return sr_add(term(nu), term(-nu));
}

// Tail integral representation, valid for c = nu - mu + 1/2 > 0. The
// integrand is positive, so W > 0 on this route and env == |W|.
inline scaled_real whittaker_w_integral_scaled(double mu, double nu, double z) {
  const double c = nu - mu + 0.5;
  const double lj = whittaker_tail_integral_log(c, nu + mu - 0.5, z);
  const double lw = -0.5 * z + mu * std::log(z) - lgamma_pos(c) + lj;
  return sr_term({1, lw});
}

// Large-z evaluation for mu past the integral window: seed two orders below
// nu + 1/2 and climb with W_{m+1} = (z-2m) W_m + (nu^2-(m-1/2)^2) W_{m-1},
// which is upward-stable while z > 4 mu + 8.
inline scaled_real whittaker_w_recurrence_scaled(double mu, double nu, double z) {
  const int lift = static_cast<int>(std::ceil(mu - (nu - 0.5)));
  const double m0 = mu - lift;
  const scaled_real s_cur = whittaker_w_integral_scaled(m0, nu, z);
  const scaled_real s_prev = whittaker_w_integral_scaled(m0 - 1.0, nu, z);
  const double base = s_cur.val.log_abs;
  double w_prev = std::exp(s_prev.val.log_abs - base);
  double w_cur = 1.0;
  for (int k = 0; k < lift; ++k) {
    const double m = m0 + k;
    const double w_next = (z - 2.0 * m) * w_cur + (nu * nu - (m - 0.5) * (m - 0.5)) * w_prev;
    w_prev = w_cur;
    w_cur = w_next;
  }
  if (w_cur == 0.0) return {};
  const signed_log v{w_cur > 0.0 ? 1 : -1, base + std::log(std::fabs(w_cur))};
  return sr_term(v);
}

// Degenerate 2 nu: nudge nu off the integer and extrapolate the nudge away.
// The series route is analytic in the offset, so Neville on four geometric
// nodes removes it to O(delta^4).
inline scaled_real whittaker_w_offset_scaled(double mu, double nu, double z) {
  constexpr double delta = 2e-3;
  constexpr int n_nodes = 4;
  double d[n_nodes];
  scaled_real f[n_nodes];
  double env = neg_inf;
  try {
    for (int k = 0; k < n_nodes; ++k) {
      d[k] = delta / (1 << k);
      f[k] = whittaker_w_series_scaled(mu, nu + d[k], z);
      env = std::max(env, f[k].log_env);
    }
  } catch (const convergence_error& e) {
    throw degenerate_parameter_error(std::string("degenerate 2 nu fallback failed: ") + e.what());
  }
  double r[n_nodes];
  for (int k = 0; k < n_nodes; ++k)
    r[k] = f[k].val.sign == 0 ? 0.0 : f[k].val.sign * std::exp(f[k].val.log_abs - env);
  // Neville tableau evaluated at offset 0
  for (int level = 1; level < n_nodes; ++level)
    for (int k = 0; k < n_nodes - level; ++k)
      r[k] = ((0.0 - d[k + level]) * r[k] - (0.0 - d[k]) * r[k + 1]) / (d[k] - d[k + level]);
  if (r[0] == 0.0) return {{}, env};
  const signed_log v{r[0] > 0.0 ? 1 : -1, env + std::log(std::fabs(r[0]))};
  // headroom for the extrapolation weights so the residual stays bounded
  return {v, env + 3.0};
}

// Route selection. The eigenvalue conditions always live in the series
// region (z <= 2 sqrt(u) implies z <= 4 mu + 8 there); the other routes
// serve wavefunction tails and degenerate 2 nu.
inline scaled_real whittaker_w_scaled(double mu, double nu, double z) {
  const bool deg = near_integer_2nu(nu);
  const double c = nu - mu + 0.5;
  const bool large = z > 12.0 && z > 4.0 * mu + 8.0;
  if (!deg) {
    if (!large) return whittaker_w_series_scaled(mu, nu, z);
    if (c > 0.01) return whittaker_w_integral_scaled(mu, nu, z);
    return whittaker_w_recurrence_scaled(mu, nu, z);
  }
  if (c > 0.01) return whittaker_w_integral_scaled(mu, nu, z);
  if (large) return whittaker_w_recurrence_scaled(mu, nu, z);
  return whittaker_w_offset_scaled(mu, nu, z);
}

inline scaled_real whittaker_w_scaled(const WhittakerParams& p, double z) {
  return whittaker_w_scaled(p.mu, p.nu, z);
}

// dW/dz with the same scaling contract as whittaker_w_scaled.
inline scaled_real whittaker_w_dz_scaled(const WhittakerParams& p, double z) {
  const double mu = p.mu;
  const double nu = p.nu;
  const bool deg = near_integer_2nu(nu);
  const bool large = z > 12.0 && z > 4.0 * mu + 8.0;
  if (!deg && !large) {
    // term-wise derivative of the Gamma-weighted sum
    const double lz = std::log(z);
    auto term = [&](double nn) -> scaled_real {
      const signed_log g_num = lgamma_signed(-2.0 * nn);
      const signed_log g_den_inv = lgamma_signed_inv(0.5 - nn - mu);
      if (g_den_inv.sign == 0) return {};
      const double a = 0.5 + nn - mu;
      const double b = 1.0 + 2.0 * nn;
      const double f = kummer_M(a, b, z);
      const double fp = (a / b) * kummer_M(a + 1.0, b + 1.0, z);
      const double inner_a = (-0.5 + (nn + 0.5) / z) * f;
      const double inner = inner_a + fp;
      const double log_pref =
          g_num.log_abs + g_den_inv.log_abs - 0.5 * z + (nn + 0.5) * lz;
      const int sign_pref = g_num.sign * g_den_inv.sign;
      const double env_inner = std::max(std::fabs(inner_a), std::fabs(fp));
      scaled_real out;
      if (inner != 0.0)
        out.val = {sign_pref * (inner > 0.0 ? 1 : -1), log_pref + std::log(std::fabs(inner))};
      out.log_env = env_inner > 0.0 ? log_pref + std::log(env_inner) : neg_inf;
      return out;
    };
    return sr_add(term(nu), term(-nu));
  }
  // z W' = (mu - z/2) W - (nu^2 - (mu-1/2)^2) W_{mu-1}
  const scaled_real w = whittaker_w_scaled(mu, nu, z);
  const scaled_real w_dn = whittaker_w_scaled(mu - 1.0, nu, z);
  const scaled_real t1 = sr_scale(w, mu - 0.5 * z);
  const scaled_real t2 = sr_scale(w_dn, -(nu * nu - (mu - 0.5) * (mu - 0.5)));
  return sr_scale(sr_add(t1, t2), 1.0 / z);
}

}  // namespace detail

// Whittaker W, the exponentially decaying solution: for large z it behaves
// as exp(-z/2) z^mu. Returns +-inf honestly when out of double range.
inline double whittaker_W(const WhittakerParams& p, double z) {
  if (!(z > 0.0)) throw domain_error("whittaker_W: z must be > 0");
  return detail::sr_value(detail::whittaker_w_scaled(p, z));
}

inline double whittaker_W_dz(const WhittakerParams& p, double z) {
  if (!(z > 0.0)) throw domain_error("whittaker_W_dz: z must be > 0");
  return detail::sr_value(detail::whittaker_w_dz_scaled(p, z));
}

}  // namespace qwell
