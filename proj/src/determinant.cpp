#include "tte/determinant.hpp"

#include <cmath>

#include <fmt/format.h>

#include "tte/error.hpp"

namespace tte {

namespace {

constexpr double kSeriesArgument = 1e-3;

struct ScaledTrig {
  cplx sin;      // sin(w) e^{-|Im w|}
  cplx cos;      // cos(w) e^{-|Im w|}
  double shift;  // |Im w|
};

ScaledTrig scaled_trig(cplx w) {
  const double x = w.real();
  const double y = w.imag();
  const double ay = std::abs(y);
  const double e = std::exp(-2.0 * ay);
  const double ch = 0.5 * (1.0 + e);
  const double sh = std::copysign(0.5 * (1.0 - e), y);
  return {{std::sin(x) * ch, std::cos(x) * sh}, {std::cos(x) * ch, -std::sin(x) * sh}, ay};
}

// sin(ka)/k and its k-derivative by Taylor series for small |ka|.
void sinc_series(cplx k, double a, cplx& value, cplx& deriv) {
  const cplx w2 = (k * a) * (k * a);
  // sin(ka)/k = a (1 - w^2/6 + w^4/120 - w^6/5040)
  value = a * (1.0 - w2 / 6.0 + w2 * w2 / 120.0 - w2 * w2 * w2 / 5040.0);
  // d/dk = a^3 k (-1/3 + w^2/30 - w^4/840)
  deriv = a * a * a * k * (-1.0 / 3.0 + w2 / 30.0 - w2 * w2 / 840.0);
}

}  // namespace

DeterminantValue d0(const Profile& profile, cplx k, const SolverOptions& opts,
                    bool with_derivative) {
  const double a = profile.radius();
  const SolutionTrace trace = solve_radial(profile, k, 0, opts, with_derivative);
  const ScaledTrig trig = scaled_trig(k * a);

  // Everything below carries the common factor e^{|Im ka|}.
  cplx sinc;
  cplx dsinc;
  if (std::abs(k * a) < kSeriesArgument) {
    sinc_series(k, a, sinc, dsinc);
    const double undo = std::exp(-trig.shift);
    sinc *= undo;
    dsinc *= undo;
  } else {
    sinc = trig.sin / k;
    dsinc = (k * a * trig.cos - trig.sin) / (k * k);
  }
  const cplx first = sinc * trace.yp_a;
  const cplx second = trig.cos * trace.y_a;
  const cplx scaled = (first - second) / (a * a);
  const double grow = std::exp(trig.shift);

  DeterminantValue out;
  out.k = k;
  out.l = 0;
  out.value = scaled * grow;
  out.term_scale = (std::abs(first) + std::abs(second)) * grow / (a * a);
  out.log_abs = std::log(std::abs(scaled)) + trig.shift;
  out.normalized = a * a * k * std::pow(profile.n(0.0), 0.25) * out.value;
  if (with_derivative) {
    const cplx dscaled = (dsinc * trace.yp_a + sinc * *trace.dyp_a + a * trig.sin * trace.y_a -
                          trig.cos * *trace.dy_a) /
                         (a * a);
    out.derivative = dscaled * grow;
  }
  return out;
}

DeterminantValue dl(const Profile& profile, cplx k, int l, const SolverOptions& opts) {
  if (l < 1 || l > kMaxAngularIndex) {
    throw ValidationError(fmt::format("d_l requires 1 <= l <= {}, got {}", kMaxAngularIndex, l));
  }
  const double a = profile.radius();
  const SolutionTrace trace = solve_radial(profile, k, l, opts, false);
  const BesselEval j = sph_bessel(l, k * a);
  const cplx first = -trace.y_a * k * j.derivative;
  const cplx second = j.value * trace.yp_a;
  DeterminantValue out;
  out.k = k;
  out.l = l;
  out.value = first + second;
  out.term_scale = std::abs(first) + std::abs(second);
  out.log_abs = std::log(std::abs(out.value));
  return out;
}

double normalized_residual(const Profile& profile, double k, const SolverOptions& opts) {
  if (!profile.strict()) {
    throw ValidationError("normalized residual requires a strict profile (n(a) = 1)");
  }
  const DerivedScales scales = travel_time(profile);
  const DeterminantValue d = d0(profile, k, opts, false);
  return std::abs(*d.normalized - std::sin(k * scales.s));
}

}  // namespace tte
