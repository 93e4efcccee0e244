#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qwell/errors.hpp"
#include "qwell/model.hpp"
#include "qwell/wavefun.hpp"

namespace qwell {

// Symmetric Dirichlet box [-L, L] in units of d. points interior nodes, odd
// so that x = 0 is a node and parity survives discretization.
struct OracleConfig {
  double half_width_over_d{60.0};
  int points{24001};
  bool want_eigenvectors{false};

  double step() const { return 2.0 * half_width_over_d / (points + 1); }
};

struct OracleEigenvector {
  std::vector<double> x_over_d;
  std::vector<double> values;  // unit discrete L2 norm with step weight
};

struct OracleResult {
  std::vector<double> eigen_kappa_d;  // decreasing; negative-energy states only
  std::vector<OracleEigenvector> eigenvectors;
  double half_width_over_d{0.0};
  int points{0};
  double step{0.0};
  // set when exp(-2 kappa L) >= 1e-8 for the shallowest reported state, i.e.
  // the box is visibly squeezing it
  bool domain_too_small{false};
};

namespace detail {

// eigenvalues of the tridiagonal strictly below lambda, by Sturm count
inline int sturm_count_below(const std::vector<double>& diag, double off_sq, double lambda) {
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    q = diag[i] - lambda - (i == 0 ? 0.0 : off_sq / q);
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

// k-th smallest eigenvalue (k is 0-based) by bisection on the Sturm count
inline double sturm_bisect(const std::vector<double>& diag, double off, double lo, double hi,
                           int k) {
  const double off_sq = off * off;
  for (int it = 0; it < 300 && hi - lo > 1e-13 + 1e-15 * std::fabs(lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count_below(diag, off_sq, mid) >= k + 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// one linear solve of (tridiag - sigma I) y = r, Gaussian elimination with
// partial pivoting (fill-in limited to a second superdiagonal)
inline void shifted_tridiag_solve(const std::vector<double>& diag, double off, double sigma,
                                  std::vector<double>& r) {
  const std::size_t n = diag.size();
  std::vector<double> d(n), u1(n, 0.0), u2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - sigma;
  for (std::size_t i = 0; i + 1 < n; ++i) u1[i] = off;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double sub = off;
    if (std::fabs(sub) > std::fabs(d[k])) {
      std::swap(d[k], sub);
      std::swap(u1[k], d[k + 1]);
      if (k + 2 < n) std::swap(u2[k], u1[k + 1]);
      std::swap(r[k], r[k + 1]);
    }
    if (d[k] == 0.0) d[k] = 1e-300;
    const double m = sub / d[k];
    d[k + 1] -= m * u1[k];
    if (k + 2 < n) u1[k + 1] -= m * u2[k];
    r[k + 1] -= m * r[k];
  }
  if (d[n - 1] == 0.0) d[n - 1] = 1e-300;
  for (std::size_t ir = n; ir-- > 0;) {
    double v = r[ir];
    if (ir + 1 < n) v -= u1[ir] * r[ir + 1];
    if (ir + 2 < n) v -= u2[ir] * r[ir + 2];
    r[ir] = v / d[ir];
  }
}

inline void renormalize(std::vector<double>& v, double h) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s * h);
  if (s == 0.0) return;
  for (double& x : v) x /= s;
}

}  // namespace detail

// Discretize psi'' = (V - E) psi with the 3-point stencil on the Dirichlet
// box and report the bound part of the spectrum. No special functions are
// involved anywhere in this path.
inline OracleResult solve_fd(const WellSpec& spec, const OracleConfig& config, int n_states) {
  if (!(config.half_width_over_d > 0.0) || !std::isfinite(config.half_width_over_d))
    throw domain_error("solve_fd: half_width_over_d must be > 0");
  if (config.points < 3 || config.points % 2 == 0)
    throw domain_error("solve_fd: points must be odd and >= 3");
  if (n_states < 1) throw domain_error("solve_fd: n_states must be >= 1");

  const int n = config.points;
  const double L = config.half_width_over_d;
  const double h = config.step();
  const double off = -1.0 / (h * h);

  std::vector<double> x(n), diag(n);
  double v_min = 0.0;
  for (int i = 0; i < n; ++i) {
    x[i] = -L + (i + 1) * h;
    const double v = potential_value(spec, std::fabs(x[i]));
    diag[i] = 2.0 / (h * h) + v;
    v_min = std::min(v_min, v);
  }

  OracleResult out;
  out.half_width_over_d = L;
  out.points = n;
  out.step = h;

  const double off_sq = off * off;
  const int n_negative = detail::sturm_count_below(diag, off_sq, 0.0);
  const int m = std::min(n_states, n_negative);
  const double lo0 = v_min - 1e-9 * (std::fabs(v_min) + 1.0);
  for (int k = 0; k < m; ++k) {
    const double e = detail::sturm_bisect(diag, off, lo0, 0.0, k);
    if (!(e < 0.0)) break;
    out.eigen_kappa_d.push_back(std::sqrt(-e));
    if (config.want_eigenvectors) {
      OracleEigenvector vec;
      vec.x_over_d = x;
      vec.values.resize(n);
      for (int i = 0; i < n; ++i)
        vec.values[i] = std::sin((k + 1) * detail::pi * (i + 1) / (n + 1));
      detail::renormalize(vec.values, h);
      for (int pass = 0; pass < 3; ++pass) {
        detail::shifted_tridiag_solve(diag, off, e, vec.values);
        detail::renormalize(vec.values, h);
      }
      out.eigenvectors.push_back(std::move(vec));
    }
  }
  if (!out.eigen_kappa_d.empty()) {
    const double kappa_min = out.eigen_kappa_d.back();
    out.domain_too_small = !(std::exp(-2.0 * kappa_min * L) < 1e-8);
  }
  return out;
}

// Two solves at h and h/2 and the O(h^2) energy extrapolation. Eigenvectors
// are not extrapolated.
inline OracleResult solve_fd_richardson(const WellSpec& spec, const OracleConfig& config,
                                        int n_states) {
  OracleConfig coarse = config;
  coarse.want_eigenvectors = false;
  OracleConfig fine = coarse;
  fine.points = 2 * config.points + 1;
  const OracleResult r1 = solve_fd(spec, coarse, n_states);
  const OracleResult r2 = solve_fd(spec, fine, n_states);
  OracleResult out;
  out.half_width_over_d = r2.half_width_over_d;
  out.points = r2.points;
  out.step = r2.step;
  out.domain_too_small = r1.domain_too_small || r2.domain_too_small;
  const std::size_t m = std::min(r1.eigen_kappa_d.size(), r2.eigen_kappa_d.size());
  for (std::size_t k = 0; k < m; ++k) {
    const double e1 = -r1.eigen_kappa_d[k] * r1.eigen_kappa_d[k];
    const double e2 = -r2.eigen_kappa_d[k] * r2.eigen_kappa_d[k];
    const double e = (4.0 * e2 - e1) / 3.0;
    if (e < 0.0) out.eigen_kappa_d.push_back(std::sqrt(-e));
  }
  return out;
}

// |<psi_fd, psi_analytic>| with both factors renormalized on the oracle's
// nodes; the analytic grid is linearly interpolated onto them.
inline double overlap(const OracleEigenvector& oracle_vec, const WavefunctionGrid& analytic) {
  if (oracle_vec.x_over_d.size() != oracle_vec.values.size() || oracle_vec.x_over_d.size() < 2)
    throw grid_mismatch_error("overlap: malformed oracle eigenvector");
  if (analytic.x_over_d.size() < 2)
    throw grid_mismatch_error("overlap: analytic grid too small");
  const double a_lo = analytic.x_over_d.front();
  const double a_hi = analytic.x_over_d.back();
  if (oracle_vec.x_over_d.front() < a_lo || oracle_vec.x_over_d.back() > a_hi)
    throw grid_mismatch_error("overlap: oracle grid extends past the analytic grid");

  double dot = 0.0, nf = 0.0, na = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < oracle_vec.x_over_d.size(); ++i) {
    const double xx = oracle_vec.x_over_d[i];
    while (j + 2 < analytic.x_over_d.size() && analytic.x_over_d[j + 1] < xx) ++j;
    const double x0 = analytic.x_over_d[j];
    const double x1 = analytic.x_over_d[j + 1];
    const double w = x1 > x0 ? (xx - x0) / (x1 - x0) : 0.0;
    const double pa = analytic.psi[j] + w * (analytic.psi[j + 1] - analytic.psi[j]);
    const double pf = oracle_vec.values[i];
    dot += pf * pa;
    nf += pf * pf;
    na += pa * pa;
  }
  if (nf == 0.0 || na == 0.0) throw grid_mismatch_error("overlap: zero-norm factor");
  return std::fabs(dot) / std::sqrt(nf * na);
}

}  // namespace qwell
