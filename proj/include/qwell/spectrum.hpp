#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qwell/errors.hpp"
#include "qwell/model.hpp"
#include "qwell/specfun.hpp"

namespace qwell {

enum class Parity { Even, Odd };

inline const char* parity_name(Parity p) { return p == Parity::Even ? "even" : "odd"; }

struct BoundState {
  int index{0};
  Parity parity{Parity::Even};
  double kappa_d{0.0};
  double energy_dimless{0.0};  // -kappa_d^2, from the class's stated zero
  int node_count{0};
};

struct SpectrumResult {
  std::vector<BoundState> states;  // sorted by decreasing kappa_d
  bool possibly_incomplete{false};
  std::vector<std::string> warnings;
};

struct SweepRow {
  double u{0.0};
  std::vector<std::pair<int, double>> states;  // (index, kappa_d)
  std::optional<std::string> error;
};

// No eigenvalue can lie below the potential minimum. The extension only
// deepens the well by at most u1, so u1 widens the scan window.
inline double kappa_d_bound(const WellSpec& spec) {
  double depth = spec.class_p == 1 ? spec.u / 4.0 : spec.u;
  if (spec.extension) depth += spec.extension->u1;
  return std::sqrt(depth);
}

namespace detail {

inline ReducedProblem reduce_any(const WellSpec& spec, double kappa_d) {
  return spec.extension ? reduce_extended(spec, kappa_d) : reduce(spec, kappa_d);
}

inline void check_condition_domain(const WellSpec& spec, double kappa_d) {
  if (!(kappa_d > 0.0) || !std::isfinite(kappa_d))
    throw domain_error("condition: kappa_d must be > 0");
  if (kappa_d > kappa_d_bound(spec) * (1.0 + 1e-9))
    throw domain_error("condition: kappa_d beyond the depth bound");
}

}  // namespace detail

// psi(0) = 0. Zeros are the odd eigenvalues. For the Whittaker classes the
// residual is the envelope-scaled W so it stays bounded where the bare
// Gamma-weighted terms overflow.
inline double odd_condition(const WellSpec& spec, double kappa_d) {
  detail::check_condition_domain(spec, kappa_d);
  const ReducedProblem rp = detail::reduce_any(spec, kappa_d);
  const double xi = rp.scale * kappa_d;
  if (rp.kind == ReducedKind::Bessel) return bessel_K(*rp.bessel_order, xi);
  return detail::sr_residual(detail::whittaker_w_scaled(*rp.whittaker, xi));
}

// psi'(0) = 0. For class 0 this is d/dxi [sqrt(xi) K_a(xi)], which stays in
// real arithmetic for imaginary order.
inline double even_condition(const WellSpec& spec, double kappa_d) {
  detail::check_condition_domain(spec, kappa_d);
  const ReducedProblem rp = detail::reduce_any(spec, kappa_d);
  const double xi = rp.scale * kappa_d;
  if (rp.kind == ReducedKind::Bessel) {
    const BesselKPair kp = bessel_K_pair(*rp.bessel_order, xi);
    return 0.5 * kp.value / std::sqrt(xi) + std::sqrt(xi) * kp.derivative;
  }
  return detail::sr_residual(detail::whittaker_w_dz_scaled(*rp.whittaker, xi));
}

namespace detail {

struct polished_root {
  double kappa_d;
  int slope_sign;  // sign of the condition's crossing direction
};

template <class F>
polished_root polish_root(const F& f, double lo, double hi, double f_lo, double f_hi) {
  const int slope = f_hi > f_lo ? 1 : -1;
  // bisection to a 1e-12 wide bracket
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return {mid, slope};
    if ((fm > 0.0) == (f_hi > 0.0)) {
      hi = mid;
      f_hi = fm;
    } else {
      lo = mid;
      f_lo = fm;
    }
  }
  // secant steps accepted only while they stay inside the bracket
  double a = lo, b = hi, fa = f_lo, fb = f_hi;
  for (int it = 0; it < 30; ++it) {
    const double denom = fb - fa;
    if (denom == 0.0) break;
    const double x = b - fb * (b - a) / denom;
    if (!(x > lo && x < hi)) break;
    const double fx = f(x);
    if (std::fabs(x - b) <= 1e-14 * std::fabs(x)) return {x, slope};
    if (fx == 0.0) return {x, slope};
    if ((fx > 0.0) == (fb > 0.0)) {
      b = x;
      fb = fx;
    } else {
      a = b;
      fa = fb;
      b = x;
      fb = fx;
    }
    if ((fa > 0.0) == (fb > 0.0)) {  // bracket lost; fall back to midpoint
      return {0.5 * (lo + hi), slope};
    }
  }
  return {0.5 * (a + b), slope};
}

// One downward scan step over the cell [lo, hi]. Roots are appended in
// decreasing kappa_d; the midpoint sample catches pairs of roots hiding
// inside a single cell.
template <class F>
void scan_cell_down(const F& f, double lo, double hi, double f_lo, double f_hi,
                    const char* label, std::vector<polished_root>& roots) {
  auto sgn = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
  const double mid = 0.5 * (lo + hi);
  const double f_mid = f(mid);
  const bool change_hi = sgn(f_mid) * sgn(f_hi) < 0;
  const bool change_lo = sgn(f_lo) * sgn(f_mid) < 0;
  if (change_lo && change_hi)
    throw scan_resolution_error(
        std::string("two ") + label + "-condition sign changes inside one scan cell", lo, hi);
  if (change_hi)
    roots.push_back(polish_root(f, mid, hi, f_mid, f_hi));
  else if (f_mid == 0.0)
    roots.push_back({mid, sgn(f_hi)});
  else if (change_lo)
    roots.push_back(polish_root(f, lo, mid, f_lo, f_mid));
  else if (f_lo == 0.0)
    roots.push_back({lo, sgn(f_mid)});
  // consecutive simple zeros must alternate crossing direction; equal signs
  // mean a zero slipped between them
  const std::size_t n = roots.size();
  if (n >= 2 && roots[n - 1].slope_sign != 0 &&
      roots[n - 1].slope_sign == roots[n - 2].slope_sign)
    throw scan_resolution_error(std::string("missed ") + label +
                                    "-condition root between two like-signed crossings",
                                roots[n - 1].kappa_d, roots[n - 2].kappa_d);
}

inline std::vector<double> scan_grid(const WellSpec& spec, double kappa_min, double kappa_max) {
  std::vector<double> grid;
  if (spec.class_p == 0) {
    // levels accumulate geometrically toward zero: log spacing, 400/decade
    const double decades = std::log10(kappa_max / kappa_min);
    const int n = std::max(2, static_cast<int>(std::ceil(400.0 * decades)));
    grid.resize(n + 1);
    for (int i = 0; i <= n; ++i)
      grid[i] = kappa_min * std::pow(10.0, decades * i / n);
  } else {
    const int n = 2000;
    grid.resize(n + 1);
    for (int i = 0; i <= n; ++i)
      grid[i] = kappa_min + (kappa_max - kappa_min) * i / n;
  }
  grid.back() = kappa_max;
  return grid;
}

}  // namespace detail

// Locate the bound states: walk the scan grid downward from the depth bound,
// bracket sign changes of both parity conditions, polish, and stop once
// max_states roots are in hand. The walk only continues toward kappa_min
// while states are still missing, so the ever-denser accumulation regions
// near kappa_d = 0 are never entered needlessly. Parity alternation of the
// merged list is verified instead of silently reindexed.
inline SpectrumResult find_spectrum(const WellSpec& spec, int max_states,
                                    double kappa_min = 1e-6) {
  if (max_states < 1) throw domain_error("find_spectrum: max_states must be >= 1");
  const double bound = kappa_d_bound(spec);
  if (!(kappa_min > 0.0) || kappa_min >= bound)
    throw domain_error("find_spectrum: kappa_min must lie in (0, depth bound)");
  const double top = bound * (1.0 - 1e-12);
  const std::vector<double> grid = detail::scan_grid(spec, kappa_min, top);

  const auto f_even = [&](double k) { return even_condition(spec, k); };
  const auto f_odd = [&](double k) { return odd_condition(spec, k); };
  std::vector<detail::polished_root> even_roots, odd_roots;
  bool reached_floor = true;
  double fe_hi = f_even(grid.back());
  double fo_hi = f_odd(grid.back());
  for (std::size_t i = grid.size() - 1; i-- > 0;) {
    const double lo = grid[i];
    const double hi = grid[i + 1];
    const double fe_lo = f_even(lo);
    const double fo_lo = f_odd(lo);
    detail::scan_cell_down(f_even, lo, hi, fe_lo, fe_hi, "even", even_roots);
    detail::scan_cell_down(f_odd, lo, hi, fo_lo, fo_hi, "odd", odd_roots);
    if (static_cast<int>(even_roots.size() + odd_roots.size()) >= max_states) {
      reached_floor = false;
      break;
    }
    fe_hi = fe_lo;
    fo_hi = fo_lo;
  }

  struct tagged {
    double kappa_d;
    Parity parity;
  };
  std::vector<tagged> merged;
  merged.reserve(even_roots.size() + odd_roots.size());
  for (const auto& r : even_roots) merged.push_back({r.kappa_d, Parity::Even});
  for (const auto& r : odd_roots) merged.push_back({r.kappa_d, Parity::Odd});
  std::sort(merged.begin(), merged.end(),
            [](const tagged& a, const tagged& b) { return a.kappa_d > b.kappa_d; });

  for (std::size_t i = 0; i < merged.size(); ++i) {
    const Parity expect = i % 2 == 0 ? Parity::Even : Parity::Odd;
    if (merged[i].parity != expect)
      throw parity_order_error("state " + std::to_string(i) + " at kappa_d = " +
                               std::to_string(merged[i].kappa_d) + " has parity " +
                               parity_name(merged[i].parity) + ", expected " +
                               parity_name(expect));
  }

  SpectrumResult out;
  const std::size_t keep = std::min<std::size_t>(max_states, merged.size());
  out.states.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    BoundState s;
    s.index = static_cast<int>(i);
    s.parity = merged[i].parity;
    s.kappa_d = merged[i].kappa_d;
    s.energy_dimless = -merged[i].kappa_d * merged[i].kappa_d;
    s.node_count = static_cast<int>(i);
    out.states.push_back(s);
  }
  if (reached_floor && static_cast<int>(out.states.size()) < max_states) {
    out.possibly_incomplete = true;
    out.warnings.push_back("spectrum may continue below kappa_min; found " +
                           std::to_string(out.states.size()) + " of " +
                           std::to_string(max_states) + " requested states");
  }
  return out;
}

// One spectrum per depth; rows are independent and computed concurrently.
inline std::vector<SweepRow> sweep(int class_p, const std::vector<double>& u_grid,
                                   int n_states) {
  if (n_states < 1) throw domain_error("sweep: n_states must be >= 1");
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    if (!(u_grid[i] > 0.0)) throw domain_error("sweep: depths must be > 0");
    if (i > 0 && !(u_grid[i] > u_grid[i - 1]))
      throw domain_error("sweep: u_grid must be strictly increasing");
  }
  std::vector<SweepRow> rows(u_grid.size());
  auto work = [&](std::size_t i) {
    rows[i].u = u_grid[i];
    try {
      const WellSpec spec(class_p, u_grid[i]);
      const SpectrumResult res = find_spectrum(spec, n_states);
      for (const BoundState& s : res.states) rows[i].states.emplace_back(s.index, s.kappa_d);
    } catch (const error& e) {
      rows[i].error = e.what();
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t stripes = std::min<std::size_t>(hw, u_grid.size());
  std::vector<std::future<void>> futures;
  futures.reserve(stripes);
  for (std::size_t s = 0; s < stripes; ++s) {
    futures.push_back(std::async(std::launch::async, [&, s] {
      for (std::size_t i = s; i < u_grid.size(); i += stripes) work(i);
    }));
  }
  for (auto& f : futures) f.get();
  return rows;
}

}  // namespace qwell
