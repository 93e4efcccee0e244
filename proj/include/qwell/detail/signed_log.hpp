#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace qwell::detail {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// Number carried as sign * exp(log_abs). sign == 0 encodes an exact zero.
struct signed_log {
  int sign{0};
  double log_abs{neg_inf};
};

inline signed_log slog_from(double v) {
  if (v == 0.0) return {};
  return {v > 0.0 ? 1 : -1, std::log(std::fabs(v))};
}

// sign * exp(log_abs); overflows to +-inf / underflows to 0 honestly.
inline double slog_value(const signed_log& v) {
  if (v.sign == 0) return 0.0;
  return static_cast<double>(v.sign) * std::exp(v.log_abs);
}

inline signed_log slog_mul(const signed_log& a, const signed_log& b) {
  if (a.sign == 0 || b.sign == 0) return {};
  return {a.sign * b.sign, a.log_abs + b.log_abs};
}

inline signed_log slog_scale(const signed_log& a, double c) {
  if (a.sign == 0 || c == 0.0) return {};
  return {c > 0.0 ? a.sign : -a.sign, a.log_abs + std::log(std::fabs(c))};
}

inline signed_log slog_add(const signed_log& a, const signed_log& b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  const double big = std::max(a.log_abs, b.log_abs);
  const double t = a.sign * std::exp(a.log_abs - big) + b.sign * std::exp(b.log_abs - big);
  if (t == 0.0) return {};
  return {t > 0.0 ? 1 : -1, big + std::log(std::fabs(t))};
}

// Sum of signed-log terms with the largest contributing magnitude kept, so
// a nearly cancelled result can still be expressed as a bounded residual.
struct scaled_real {
  signed_log val{};
  double log_env{neg_inf};
};

inline scaled_real sr_term(const signed_log& v) { return {v, v.log_abs}; }

inline scaled_real sr_add(const scaled_real& a, const scaled_real& b) {
  return {slog_add(a.val, b.val), std::max(a.log_env, b.log_env)};
}

inline scaled_real sr_scale(const scaled_real& a, double c) {
  if (c == 0.0) return {};
  const double lc = std::log(std::fabs(c));
  scaled_real r{slog_scale(a.val, c), a.log_env};
  if (a.log_env != neg_inf) r.log_env += lc;
  return r;
}

// val / exp(log_env): same zeros and signs as the value, bounded near them.
inline double sr_residual(const scaled_real& a) {
  if (a.val.sign == 0) return 0.0;
  return static_cast<double>(a.val.sign) * std::exp(a.val.log_abs - a.log_env);
}

inline double sr_value(const scaled_real& a) { return slog_value(a.val); }

}  // namespace qwell::detail
