#include "tte/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "tte/error.hpp"

namespace tte {

namespace {

constexpr double kL0SeriesRadius = 1e-3;
constexpr int kMaxSeriesTerms = 200;
constexpr double kSeriesRadius = 1.0;
constexpr int kMillerMargin = 20;
constexpr double kRescaleThreshold = 1e200;

// j_l(z) = z^l / (2l+1)!! * sum_k (-z^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1)).
// The derivative is summed term by term from the same coefficients.
BesselEval series(int l, cplx z) {
  double double_factorial = 1.0;
  for (int j = 3; j <= 2 * l + 1; j += 2) double_factorial *= j;

  cplx z_pow_lm1 = 1.0;  // z^(l-1), only used for l >= 1
  for (int j = 0; j < l - 1; ++j) z_pow_lm1 *= z;
  const cplx z_pow_l = l == 0 ? cplx(1.0) : z_pow_lm1 * z;

  const cplx w = -0.5 * z * z;
  cplx term = 1.0 / double_factorial;  // coefficient of z^(l+2k), times z^(2k)
  cplx sum = term;
  cplx dsum = static_cast<double>(l) * term;  // sum_k (l+2k) c_k z^(2k)
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    term *= w / (static_cast<double>(k + 1) * (2.0 * l + 2.0 * k + 3.0));
    sum += term;
    dsum += static_cast<double>(l + 2 * (k + 1)) * term;
    if (std::abs(term) <= std::numeric_limits<double>::epsilon() * 0.25 * std::abs(sum)) break;
  }

  BesselEval out{l, z, z_pow_l * sum, 0.0};
  if (l == 0) {
    // d/dz sum_k c_k z^(2k) = z * sum_k 2k c_k z^(2k-2); dsum already holds 2k c_k z^(2k).
    out.derivative = std::abs(z) == 0.0 ? cplx(0.0) : dsum / z;
  } else {
    out.derivative = z_pow_lm1 * dsum;
  }
  return out;
}

}  // namespace

BesselEval sph_bessel(int l, cplx z) {
  if (l < 0 || l > kMaxAngularIndex) {
    throw ValidationError(fmt::format("spherical Bessel order {} outside [0, {}]", l,
                                      kMaxAngularIndex));
  }
  const double mag = std::abs(z);
  if (mag <= (l == 0 ? kL0SeriesRadius : kSeriesRadius)) return series(l, z);

  const cplx s = std::sin(z);
  const cplx c = std::cos(z);
  const cplx j0 = s / z;
  const cplx j1 = s / (z * z) - c / z;
  if (l == 0) return {0, z, j0, -j1};

  // Miller: run the recurrence downward from well above max(l, |z|), where j_n
  // is the minimal solution, then normalize against j0 or j1, whichever is larger.
  // Upward recurrence cancels catastrophically off the real axis.
  const int start = std::max(l, static_cast<int>(mag)) + kMillerMargin +
                    static_cast<int>(std::cbrt(mag) * 4.0);
  cplx next = 0.0;
  cplx cur = 1e-30;
  cplx at_l = 0.0, at_lm1 = 0.0, at_0 = 0.0, at_1 = 0.0;
  for (int n = start; n >= 1; --n) {
    const cplx prev = static_cast<double>(2 * n + 1) / z * cur - next;
    next = cur;
    cur = prev;  // now holds j_{n-1} up to scale, `next` holds j_n
    if (n == l) at_l = next;
    if (n - 1 == l - 1) at_lm1 = cur;
    if (n == 1) {
      at_1 = next;
      at_0 = cur;
    }
    if (std::abs(cur) > kRescaleThreshold) {
      const double f = 1.0 / std::abs(cur);
      cur *= f;
      next *= f;
      at_l *= f;
      at_lm1 *= f;
      at_0 *= f;
      at_1 *= f;
    }
  }
  const cplx scale = std::abs(j0) >= std::abs(j1) ? j0 / at_0 : j1 / at_1;
  const cplx value = at_l * scale;
  const cplx lower = at_lm1 * scale;
  return {l, z, value, lower - static_cast<double>(l + 1) / z * value};
}

}  // namespace tte
