#pragma once

#include <cmath>
#include <optional>

#include "qwell/errors.hpp"
#include "qwell/specfun.hpp"

namespace qwell {

// Optional extra attractive term -u1 * t^q / (1+t), q in {0, 1}.
struct Extension {
  double u1{0.0};
  int q{0};
};

// Potential family: class p picks the shape, u = U0 d^2 the dimensionless
// depth. Class 2 is measured from its shifted zero, so V(0) = -u there.
struct WellSpec {
  int class_p{0};
  double u{1.0};
  std::optional<Extension> extension{};

  WellSpec() = default;
  WellSpec(int p, double depth, std::optional<Extension> ext = std::nullopt)
      : class_p(p), u(depth), extension(ext) {
    if (class_p < 0 || class_p > 2) throw domain_error("WellSpec: class_p must be 0, 1 or 2");
    if (!(u > 0.0) || !std::isfinite(u)) throw domain_error("WellSpec: u must be > 0");
    if (extension) {
      if (!(extension->u1 >= 0.0) || !std::isfinite(extension->u1))
        throw domain_error("WellSpec: u1 must be >= 0");
      if (extension->q != 0 && extension->q != 1)
        throw domain_error("WellSpec: q must be 0 or 1");
    }
  }
};

// Dimensionless V(t), t = |x|/d, in units of hbar^2/(2 m d^2).
inline double potential_value(const WellSpec& spec, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw domain_error("potential_value: t must be >= 0");
  const double w = 1.0 + t;
  double v = 0.0;
  switch (spec.class_p) {
    case 0: v = -spec.u / (w * w); break;
    case 1: v = -spec.u * t / (w * w); break;
    case 2: v = -spec.u * (1.0 - t * t / (w * w)); break;
    default: throw domain_error("potential_value: unsupported class");
  }
  if (spec.extension && spec.extension->u1 > 0.0)
    v -= spec.extension->u1 * (spec.extension->q == 0 ? 1.0 : t) / w;
  return v;
}

enum class ReducedKind { Bessel, Whittaker };

// The named ODE a half-axis solution satisfies, with its argument map
// xi = scale * kappa_d * (1 +- x/d). A q = 1 extension shifts the decay
// constant; the shift is folded into scale so the map stays in kappa_d.
struct ReducedProblem {
  ReducedKind kind{ReducedKind::Bessel};
  std::optional<BesselOrder> bessel_order{};
  std::optional<WhittakerParams> whittaker{};
  double scale{1.0};
};

inline ReducedProblem reduce(const WellSpec& spec, double kappa_d) {
  if (!(kappa_d > 0.0) || !std::isfinite(kappa_d))
    throw domain_error("reduce: kappa_d must be > 0");
  if (spec.extension) throw domain_error("reduce: spec carries an extension; use reduce_extended");
  ReducedProblem out;
  switch (spec.class_p) {
    case 0: {
      out.kind = ReducedKind::Bessel;
      out.scale = 1.0;
      const double disc = 0.25 - spec.u;
      out.bessel_order = disc >= 0.0 ? BesselOrder::real(std::sqrt(disc))
                                     : BesselOrder::imaginary(std::sqrt(-disc));
      break;
    }
    case 1:
      out.kind = ReducedKind::Whittaker;
      out.scale = 2.0;
      out.whittaker = WhittakerParams(spec.u / (2.0 * kappa_d), std::sqrt(0.25 + spec.u));
      break;
    case 2:
      out.kind = ReducedKind::Whittaker;
      out.scale = 2.0;
      out.whittaker = WhittakerParams(spec.u / kappa_d, std::sqrt(0.25 + spec.u));
      break;
    default:
      throw domain_error("reduce: unsupported class");
  }
  return out;
}

// Mapping for the extended family, fixed by partial fractions:
// t^q/(1+t) = 1/(1+t) for q = 0 and 1 - 1/(1+t) for q = 1. The constant
// from q = 1 is absorbed into an effective decay constant
// kappa'_d = sqrt(kappa_d^2 - u1); the 1/(1+t) coefficient lands in mu.
inline ReducedProblem reduce_extended(const WellSpec& spec, double kappa_d) {
  if (!(kappa_d > 0.0) || !std::isfinite(kappa_d))
    throw domain_error("reduce_extended: kappa_d must be > 0");
  if (!spec.extension) throw domain_error("reduce_extended: spec carries no extension");
  const Extension& ext = *spec.extension;
  if (ext.u1 == 0.0) {
    WellSpec base(spec.class_p, spec.u);
    return reduce(base, kappa_d);
  }

  double kappa_eff = kappa_d;
  double coulomb = 0.0;  // coefficient of -1/(1+t) in the total potential
  const double base_coeff = static_cast<double>(spec.class_p);  // 0, 1, 2
  if (ext.q == 0) {
    coulomb = base_coeff * spec.u + ext.u1;
  } else {
    const double shifted = kappa_d * kappa_d - ext.u1;
    if (!(shifted > 0.0))
      throw domain_error("reduce_extended: q = 1 shift leaves no real decay constant");
    kappa_eff = std::sqrt(shifted);
    coulomb = base_coeff * spec.u - ext.u1;
  }

  double nu_sq = 0.0;  // from the 1/(1+t)^2 coefficient, unchanged by the extension
  if (spec.class_p == 0) {
    nu_sq = 0.25 - spec.u;
    if (!(nu_sq > 0.0))
      throw domain_error("reduce_extended: class 0 with u >= 1/4 leaves no real Whittaker index");
  } else {
    nu_sq = 0.25 + spec.u;
  }

  ReducedProblem out;
  out.kind = ReducedKind::Whittaker;
  out.scale = 2.0 * kappa_eff / kappa_d;
  out.whittaker = WhittakerParams(coulomb / (2.0 * kappa_eff), std::sqrt(nu_sq));
  return out;
}

}  // namespace qwell
