#pragma once

// Complex zeros of analytic functions by the argument principle.
//
// Winding numbers come from continuing arg f along the contour (phase
// tracking), never from quadrature of f'/f. Wedge searches assume the
// symmetries of d_0: f(-z) = f(z) and f(conj z) = conj f(z). Zeros are found
// in the first quadrant and the other three reflections are implied.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tte/profile.hpp"
#include "tte/radial_solver.hpp"
#include "tte/special.hpp"

namespace tte {

struct AnalyticFunction {
  std::function<cplx(cplx)> value;
  /// Optional; Newton falls back to secant steps without it.
  std::function<cplx(cplx)> derivative;
  /// Optional magnitude reference used by the degeneracy scan; defaults to 1 + |f|.
  std::function<double(cplx)> scale;
};

/// d_0 of `profile` packaged for the root finder.
AnalyticFunction make_d0_function(const Profile& profile, const SolverOptions& opts = {});

struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double diameter() const;
  cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(cplx z) const {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
};

struct CountOptions {
  /// Phase increments between consecutive boundary samples stay below this.
  double max_phase_step = 0.7853981633974483;  // pi/4
  /// Initial boundary sampling: at least this many segments per edge ...
  int min_segments_per_edge = 8;
  /// ... and no initial segment longer than this.
  double max_initial_segment = 0.25;
  /// Largest accepted distance of the phase total from an integer multiple of 2 pi, in turns.
  double max_rounding_residue = 0.25;
};

/// Number of zeros (with multiplicity) of f inside `rect`.
///
/// A zero on (or numerically on) the boundary triggers the outward perturbation
/// sequence 1e-4, 2e-4, 4e-4, ... of the rectangle size, at most 5 attempts.
int count_zeros(const AnalyticFunction& f, Rect rect, const CountOptions& opts = {});

/// Annular sector {r0 <= |k| <= r1, alpha <= arg k <= beta}.
struct WedgeRegion {
  double r0 = kMinRadius;
  double r1 = 1.0;
  double alpha = 0.0;
  double beta = 0.0;

  static constexpr double kMinRadius = 0.5;

  void validate() const;
  /// True when some reflection (z, -z, conj z, -conj z) lies in the wedge.
  bool contains_angle(double theta) const;
};

struct Zero {
  cplx location;
  int multiplicity = 1;
  double residual = 0.0;
  int newton_iters = 0;
  Rect box;
  bool refined = true;  ///< false: Newton failed and `location` is the box centre
};

struct FinderOptions {
  CountOptions count;
  double newton_tol = 1e-10;
  int newton_max_iters = 50;
  double min_box_diameter = 1e-6;
  double isolation_tol = 1e-6;
  /// Median |f| / scale below this over the region means f is identically zero.
  double degeneracy_threshold = 1e-8;
};

struct ProfileSummary {
  double a = 0.0;
  double b = 0.0;
  double n0 = 0.0;
  SignClass sign_class = SignClass::a_equals_b;
};

struct SpectrumReport {
  std::string profile_hash;
  WedgeRegion region;
  double k_min_excluded = WedgeRegion::kMinRadius;
  /// First-quadrant representatives sorted by modulus.
  std::vector<Zero> zeros;
  std::optional<ProfileSummary> profile;
  nlohmann::json settings = nlohmann::json::object();
};

/// All zeros whose reflections meet `region`. Requires the d_0 symmetries.
SpectrumReport find_zeros(const AnalyticFunction& f, const WedgeRegion& region,
                          const FinderOptions& opts = {});

/// find_zeros on d_0 of a strict profile, with the profile metadata filled in.
SpectrumReport find_d0_zeros(const Profile& profile, const WedgeRegion& region,
                             const SolverOptions& solver = {}, const FinderOptions& opts = {});

/// Distinct points among z, -z, conj z, -conj z.
std::vector<cplx> reflections(cplx z);

/// Number of zeros, with multiplicity and reflections, with |z| <= r and arg z in [alpha, beta].
int counting_function(const SpectrumReport& report, double r, double alpha, double beta);

nlohmann::json to_json(const SpectrumReport& report);
SpectrumReport spectrum_from_json(const nlohmann::json& doc);

}  // namespace tte
