#pragma once

#include <optional>

#include "tte/profile.hpp"
#include "tte/special.hpp"

namespace tte {

struct SolverOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  double k_max = 500.0;
  /// l >= 1 integration starts at r0 = start_fraction * a from Bessel data.
  double start_fraction = 1e-4;

  SolverOptions tightened(double factor) const {
    SolverOptions o = *this;
    o.rtol /= factor;
    o.atol /= factor;
    return o;
  }
};

/// Boundary data at r = a of the regular radial solution.
///
/// For l = 0 the y slots hold y(a; k) of y'' + k^2 n y = 0, y(0) = 0, y'(0) = 1,
/// and the derivative slots hold the k-derivatives from the variational system.
/// For l >= 1 they hold Y_l(a), Y_l'(a) and the derivative slots are empty.
struct SolutionTrace {
  cplx k;
  int l = 0;
  cplx y_a;
  cplx yp_a;
  std::optional<cplx> dy_a;
  std::optional<cplx> dyp_a;
  double tol_used = 0.0;
  int steps = 0;
};

/// Integrates the radial problem along real r with complex state (Runge-Kutta-
/// Fehlberg 7(8), adaptive). `with_variational` only applies to l = 0.
SolutionTrace solve_radial(const Profile& profile, cplx k, int l, const SolverOptions& opts = {},
                           bool with_variational = true);

struct AsymptoticBoundary {
  cplx y;
  cplx yp;
  bool below_regime = false;  ///< |k| < 10: the approximants are not meaningful there
};

/// Leading-order WKB approximants of (y(a;k), y'(a;k)) for l = 0:
///   y ~ sin(kb) / ((n(0) n(a))^(1/4) k),  y' ~ (n(a)/n(0))^(1/4) cos(kb).
AsymptoticBoundary asymptotic_boundary(const Profile& profile, cplx k);

}  // namespace tte
