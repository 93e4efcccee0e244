#pragma once

#include <stdexcept>
#include <string>

namespace qwell {

// Base class for every failure this library reports.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the supported parameter region.
struct domain_error : error {
  using error::error;
};

// Gamma-type pole hit exactly (non-positive integer argument).
struct pole_error : error {
  using error::error;
};

// Result exceeds the representable range.
struct overflow_error : error {
  using error::error;
};

// A series hit its term cap before meeting the stopping rule.
struct convergence_error : error {
  using error::error;
};

// 2*nu sits at/near an integer and the fallback evaluation failed too.
struct degenerate_parameter_error : error {
  using error::error;
};

// Two roots of one condition landed inside a single scan cell.
struct scan_resolution_error : error {
  double interval_lo;
  double interval_hi;
  scan_resolution_error(const std::string& msg, double lo, double hi)
      : error(msg), interval_lo(lo), interval_hi(hi) {}
};

// Merged roots do not alternate parity in energy order.
struct parity_order_error : error {
  using error::error;
};

// Wavefunction grid too coarse to separate its own sign changes.
struct grid_resolution_error : error {
  using error::error;
};

// Analytic tail would contribute too much of the norm; x_max too small.
struct tail_dominance_error : error {
  using error::error;
};

// Overlap requested between incompatible grids.
struct grid_mismatch_error : error {
  using error::error;
};

}  // namespace qwell
