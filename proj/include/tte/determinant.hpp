#pragma once

#include <optional>

#include "tte/profile.hpp"
#include "tte/radial_solver.hpp"

namespace tte {

/// Zeros with |k| below this radius are never reported: the origin zero of d_0
/// is profile-independent.
inline constexpr double kMinSpectralRadius = 0.5;

struct DeterminantValue {
  cplx k;
  int l = 0;
  cplx value;                      ///< d_l(k); may overflow to inf far from the real axis
  std::optional<cplx> derivative;  ///< d_0'(k), l = 0 only
  std::optional<cplx> normalized;  ///< a^2 k n(0)^(1/4) d_0(k), l = 0 only
  double term_scale = 0.0;         ///< sum of the magnitudes of the two cancelling terms
  double log_abs = 0.0;            ///< ln|d_l(k)|, finite even when `value` overflows
};

/// d_0(k) = (1/a^2) { sin(ka)/k * y'(a) - cos(ka) * y(a) }.
DeterminantValue d0(const Profile& profile, cplx k, const SolverOptions& opts = {},
                    bool with_derivative = true);

/// d_l(k) = det [[Y_l(a), -j_l(ka)], [Y_l'(a), -k j_l'(ka)]], 1 <= l <= 8.
DeterminantValue dl(const Profile& profile, cplx k, int l, const SolverOptions& opts = {});

/// |a^2 k n(0)^(1/4) d_0(k) - sin(k(a - b))| for real k >= 50 on a strict profile.
double normalized_residual(const Profile& profile, double k, const SolverOptions& opts = {});

}  // namespace tte
