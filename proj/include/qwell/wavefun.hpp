#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qwell/errors.hpp"
#include "qwell/model.hpp"
#include "qwell/specfun.hpp"
#include "qwell/spectrum.hpp"

namespace qwell {

struct WavefunctionGrid {
  BoundState state;
  std::vector<double> x_over_d;  // symmetric about 0
  std::vector<double> psi;       // normalized; the 1/sqrt(d) is absorbed
  double norm_constant{0.0};     // multiplies the bare matched solution
};

// Bare decaying solution evaluated at x (in units of d), mirrored across the
// origin with the state's parity sign.
inline double eval_unnormalized(const WellSpec& spec, const BoundState& state,
                                double x_over_d) {
  if (!(state.kappa_d > 0.0) || !std::isfinite(state.kappa_d))
    throw domain_error("eval_unnormalized: state.kappa_d must be > 0");
  if (!std::isfinite(x_over_d)) throw domain_error("eval_unnormalized: x must be finite");
  const double ax = std::fabs(x_over_d);
  const ReducedProblem rp = detail::reduce_any(spec, state.kappa_d);
  const double xi = rp.scale * state.kappa_d * (1.0 + ax);
  double val;
  if (rp.kind == ReducedKind::Bessel)
    val = std::sqrt(xi) * bessel_K(*rp.bessel_order, xi);
  else
    val = whittaker_W(*rp.whittaker, xi);
  if (x_over_d < 0.0 && state.parity == Parity::Odd) val = -val;
  return val;
}

namespace detail {

// Integral of the squared decaying asymptotics past the grid edge, returned
// as a multiple of psi(edge)^2. The envelope is e^{-xi} xi^{pow} times an
// inverse-power series; squaring and integrating term by term gives nested
// asymptotic sums, each truncated at its smallest term. rel_err is the sum
// of those truncations weighted by each term's share of the result.
struct tail_closure {
  double over_psi_edge_sq;
  double rel_err;
};

inline tail_closure squared_tail(double xi_edge, double pow2, double rate,
                                 const double* coeff, int n_coeff) {
  // series coefficients of the squared envelope
  double b[2 * 16] = {0.0};
  const int nb = 2 * n_coeff - 1;
  for (int i = 0; i < n_coeff; ++i)
    for (int j = 0; j < n_coeff; ++j) b[i + j] += coeff[i] * coeff[j];

  double total = 0.0;
  double err_abs = 0.0;
  double outer_scale = 1.0;  // xi_edge^{-m} accumulated
  for (int m = 0; m < nb; ++m) {
    // integral of e^{-rate(xi-xi_edge)} xi^{pow2-m} d xi, relative to the
    // edge value: asymptotic sum with ratio (pow2-m-j)/(rate*xi_edge)
    double t = 1.0 / rate;
    double s = 0.0;
    double prev = std::fabs(t);
    double trunc = 0.0;
    for (int j = 0; j < 40; ++j) {
      s += t;
      const double next = t * (pow2 - m - j) / (rate * xi_edge);
      if (std::fabs(next) >= prev) {
        trunc = std::fabs(next);
        break;
      }
      prev = std::fabs(next);
      t = next;
      if (std::fabs(t) < 1e-18 * std::fabs(s)) break;
    }
    total += b[m] * outer_scale * s;
    // truncation matters in proportion to this term's weight in the total
    err_abs += std::fabs(b[m]) * outer_scale * trunc;
    outer_scale /= xi_edge;
  }

  double a_edge = 0.0;
  double xs = 1.0;
  for (int i = 0; i < n_coeff; ++i) {
    a_edge += coeff[i] * xs;
    xs /= xi_edge;
  }
  if (a_edge == 0.0 || total <= 0.0) return {0.0, 1.0};
  return {total / (a_edge * a_edge), err_abs / total};
}

}  // namespace detail

// Normalized wavefunction on a symmetric grid. Simpson per half-axis keeps
// every stencil on one side of the |x| kink; the region past x_max is closed
// with the decaying asymptotic series of the squared solution.
inline WavefunctionGrid normalize(const WellSpec& spec, const BoundState& state,
                                  double x_max_over_d, int samples) {
  if (!(x_max_over_d > 0.0) || !std::isfinite(x_max_over_d))
    throw domain_error("normalize: x_max_over_d must be > 0");
  if (samples < 3 || samples % 2 == 0)
    throw domain_error("normalize: samples must be odd and >= 3");

  const ReducedProblem rp = detail::reduce_any(spec, state.kappa_d);
  const double s_rate = rp.scale * state.kappa_d;  // d xi / d(x/d)
  const double h = x_max_over_d / (samples - 1);

  std::vector<double> half(samples);
  for (int i = 0; i < samples; ++i) {
    half[i] = eval_unnormalized(spec, state, i * h);
  }

  // composite Simpson over [0, x_max]
  double simpson = half[0] * half[0] + half[samples - 1] * half[samples - 1];
  for (int i = 1; i < samples - 1; ++i) {
    simpson += half[i] * half[i] * (i % 2 == 1 ? 4.0 : 2.0);
  }
  simpson *= h / 3.0;

  // analytic closure of the tail
  const double xi_edge = s_rate * (1.0 + x_max_over_d);
  const double psi_edge = half[samples - 1];
  constexpr int n_coeff = 9;
  double coeff[n_coeff];
  coeff[0] = 1.0;
  detail::tail_closure tc;
  if (rp.kind == ReducedKind::Bessel) {
    // sqrt(xi) K_a(xi): envelope e^{-xi} with coefficients of K's expansion;
    // 4a^2 is real for both real and imaginary order
    const double fourasq = rp.bessel_order->kind == OrderKind::Imaginary
                               ? -4.0 * rp.bessel_order->value * rp.bessel_order->value
                               : 4.0 * rp.bessel_order->value * rp.bessel_order->value;
    for (int s = 1; s < n_coeff; ++s) {
      const double odd = 2.0 * s - 1.0;
      coeff[s] = coeff[s - 1] * (fourasq - odd * odd) / (8.0 * s);
    }
    tc = detail::squared_tail(xi_edge, 0.0, 2.0, coeff, n_coeff);
  } else {
    // W_{mu,nu}(xi): envelope e^{-xi/2} xi^{mu} with U-series coefficients
    const double mu = rp.whittaker->mu;
    const double nu = rp.whittaker->nu;
    for (int s = 1; s < n_coeff; ++s) {
      const double half_off = mu - (s - 1) - 0.5;
      coeff[s] = coeff[s - 1] * (nu * nu - half_off * half_off) / s;
    }
    tc = detail::squared_tail(xi_edge, 2.0 * mu, 1.0, coeff, n_coeff);
  }
  const double tail = psi_edge * psi_edge * tc.over_psi_edge_sq / s_rate;

  const double total = 2.0 * (simpson + tail);
  if (!(total > 0.0) || !std::isfinite(total))
    throw convergence_error("normalize: norm integral is not positive and finite");
  if (tail > 0.01 * (simpson + tail))
    throw tail_dominance_error("normalize: tail beyond x_max carries " +
                               std::to_string(100.0 * tail / (simpson + tail)) +
                               "% of the norm; increase x_max_over_d");
  if (tc.rel_err > 0.3 && tail > 1e-9 * (simpson + tail))
    throw tail_dominance_error(
        "normalize: tail asymptotics did not converge; increase x_max_over_d");

  WavefunctionGrid grid;
  grid.state = state;
  grid.norm_constant = 1.0 / std::sqrt(total);
  grid.x_over_d.resize(2 * samples - 1);
  grid.psi.resize(2 * samples - 1);
  const double parity_sign = state.parity == Parity::Odd ? -1.0 : 1.0;
  for (int i = 0; i < samples; ++i) {
    const double v = half[i] * grid.norm_constant;
    grid.x_over_d[samples - 1 + i] = i * h;
    grid.psi[samples - 1 + i] = v;
    grid.x_over_d[samples - 1 - i] = -i * h;
    grid.psi[samples - 1 - i] = parity_sign * v;
  }
  return grid;
}

inline WavefunctionGrid normalize(const WellSpec& spec, const BoundState& state) {
  return normalize(spec, state, 40.0 / state.kappa_d, 4001);
}

// Strict sign changes across the whole symmetric grid. Tracking the last
// nonzero sign counts the odd states' exact zero at x=0 as one node instead
// of two.
inline int count_nodes(const WavefunctionGrid& grid) {
  if (grid.psi.size() < 5) throw grid_resolution_error("count_nodes: grid too small");
  int count = 0;
  int last_sign = 0;
  std::ptrdiff_t last_change = -1;
  for (std::size_t i = 0; i < grid.psi.size(); ++i) {
    const double v = grid.psi[i];
    const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) {
      const std::ptrdiff_t here = static_cast<std::ptrdiff_t>(i);
      if (last_change >= 0 && here - last_change < 3)
        throw grid_resolution_error(
            "count_nodes: fewer than 3 samples between sign changes near x/d = " +
            std::to_string(grid.x_over_d[i]));
      ++count;
      last_change = here;
    }
    last_sign = s;
  }
  return count;
}

}  // namespace qwell
