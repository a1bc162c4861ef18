#pragma once

#include <complex>

namespace tte {

using cplx = std::complex<double>;

inline constexpr int kMaxAngularIndex = 8;

struct BesselEval {
  int l = 0;
  cplx z;
  cplx value;       ///< j_l(z)
  cplx derivative;  ///< j_l'(z)
};

/// Spherical Bessel function of the first kind and its derivative for complex
/// argument, 0 <= l <= 8.
///
/// Uses the ascending series for |z| <= 1 (|z| <= 1e-3 for l = 0), the closed
/// form for l = 0 and Miller's downward recurrence otherwise.
BesselEval sph_bessel(int l, cplx z);

}  // namespace tte
