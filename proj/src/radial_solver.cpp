#include "tte/radial_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "tte/error.hpp"

namespace tte {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr int kMaxSteps = 2'000'000;
constexpr double kMinStepFraction = 1e-14;
constexpr double kAsymptoticRegime = 10.0;

// Complex values packed as interleaved (re, im) doubles.
inline cplx load(const double* p) { return {p[0], p[1]}; }
inline void store(double* p, cplx v) {
  p[0] = v.real();
  p[1] = v.imag();
}

template <std::size_t N, class System>
int integrate(System&& system, std::array<double, N>& x, double t0, double t1,
              const SolverOptions& opts) {
  using State = std::array<double, N>;
  auto stepper =
      odeint::make_controlled(opts.atol, opts.rtol, odeint::runge_kutta_fehlberg78<State>());
  const double span = t1 - t0;
  double t = t0;
  double dt = span / 64.0;
  int steps = 0;
  while (t < t1) {
    if (t + dt > t1) dt = t1 - t;
    if (dt < kMinStepFraction * span) {
      throw NumericalError(fmt::format("radial solver: step-size underflow at r = {}", t));
    }
    if (stepper.try_step(system, x, t, dt) == odeint::success) ++steps;
    if (steps + 1 > kMaxSteps) throw NumericalError("radial solver: step budget exhausted");
    // try_step can land within rounding of t1.
    if (t1 - t <= 1e-15 * span) break;
  }
  return steps;
}

}  // namespace

SolutionTrace solve_radial(const Profile& profile, cplx k, int l, const SolverOptions& opts,
                           bool with_variational) {
  if (l < 0 || l > kMaxAngularIndex) {
    throw ValidationError(fmt::format("angular index {} outside [0, {}]", l, kMaxAngularIndex));
  }
  if (!(std::abs(k) <= opts.k_max)) {
    throw ValidationError(fmt::format("|k| = {} exceeds k_max = {}", std::abs(k), opts.k_max));
  }
  const double a = profile.radius();
  auto n_at = [&profile, a](double r) { return profile.n(std::clamp(r, 0.0, a)); };
  const cplx k2 = k * k;

  SolutionTrace out;
  out.k = k;
  out.l = l;
  out.tol_used = opts.rtol;

  if (l == 0 && with_variational) {
    // (y, y', u, u') with u = dy/dk:  u'' + k^2 n u = -2 k n y.
    std::array<double, 8> x{0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    auto rhs = [&](const std::array<double, 8>& s, std::array<double, 8>& ds, double r) {
      const double nr = n_at(r);
      const cplx y = load(&s[0]);
      const cplx u = load(&s[4]);
      store(&ds[0], load(&s[2]));
      store(&ds[2], -k2 * nr * y);
      store(&ds[4], load(&s[6]));
      store(&ds[6], -k2 * nr * u - 2.0 * k * nr * y);
    };
    out.steps = integrate(rhs, x, 0.0, a, opts);
    out.y_a = load(&x[0]);
    out.yp_a = load(&x[2]);
    out.dy_a = load(&x[4]);
    out.dyp_a = load(&x[6]);
    return out;
  }

  if (l == 0) {
    std::array<double, 4> x{0.0, 0.0, 1.0, 0.0};
    auto rhs = [&](const std::array<double, 4>& s, std::array<double, 4>& ds, double r) {
      store(&ds[0], load(&s[2]));
      store(&ds[2], -k2 * n_at(r) * load(&s[0]));
    };
    out.steps = integrate(rhs, x, 0.0, a, opts);
    out.y_a = load(&x[0]);
    out.yp_a = load(&x[2]);
    return out;
  }

  // Y'' + (2/r) Y' + (k^2 n - l(l+1)/r^2) Y = 0, started from the free solution
  // j_l(kr) at r0; the O(r0^2) start error is accepted.
  const double r0 = opts.start_fraction * a;
  const BesselEval start = sph_bessel(l, k * r0);
  std::array<double, 4> x{};
  store(&x[0], start.value);
  store(&x[2], k * start.derivative);
  const double ll = static_cast<double>(l * (l + 1));
  auto rhs = [&](const std::array<double, 4>& s, std::array<double, 4>& ds, double r) {
    const cplx y = load(&s[0]);
    const cplx yp = load(&s[2]);
    store(&ds[0], yp);
    store(&ds[2], -2.0 / r * yp - (k2 * n_at(r) - ll / (r * r)) * y);
  };
  out.steps = integrate(rhs, x, r0, a, opts);
  out.y_a = load(&x[0]);
  out.yp_a = load(&x[2]);
  return out;
}

AsymptoticBoundary asymptotic_boundary(const Profile& profile, cplx k) {
  const DerivedScales scales = travel_time(profile);
  const double n0 = scales.n0;
  const double na = profile.n(profile.radius());
  AsymptoticBoundary out;
  out.below_regime = std::abs(k) < kAsymptoticRegime;
  out.y = std::sin(k * scales.b) / (std::pow(n0 * na, 0.25) * k);
  out.yp = std::pow(na / n0, 0.25) * std::cos(k * scales.b);
  return out;
}

}  // namespace tte
