#pragma once

// Growth and zero-distribution diagnostics for entire functions of exponential type.

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tte/profile.hpp"
#include "tte/radial_solver.hpp"
#include "tte/rootfinder.hpp"

namespace tte {

/// ln|f(z)|, evaluated without overflow where possible.
using LogModulus = std::function<double(cplx)>;

/// ln|d_0(z)| of `profile`.
LogModulus make_d0_log_modulus(const Profile& profile, const SolverOptions& opts = {});
/// ln|sin(z)/z|.
LogModulus sinc_log_modulus();

struct IndicatorFit {
  double h = 0.0;
  double residual = 0.0;   ///< RMS residual of the regression
  bool real_axis = false;  ///< ray within 0.05 of the real axis; h = 0 by boundedness
};

/// Least-squares fit of ln|f(r e^{i theta})| = h r + c1 ln r + c0 over a
/// geometric grid of `radii` points in [r_lo, r_hi].
IndicatorFit indicator_estimate(const LogModulus& f, double theta, double r_lo, double r_hi,
                                int radii = 40);
/// Same for d_0 of a strict profile.
IndicatorFit indicator_estimate(const Profile& profile, double theta, double r_lo, double r_hi,
                                const SolverOptions& opts = {});

struct IndicatorProfile {
  std::vector<double> theta_grid;
  std::vector<double> h_values;
  std::vector<std::pair<double, double>> fit_windows;
  std::vector<double> fit_residuals;
};

IndicatorProfile indicator_profile(const LogModulus& f, std::span<const double> thetas,
                                   double r_lo, double r_hi, int radii = 40);

/// Uniform grid with `count` points on [0.05, pi - 0.05].
std::vector<double> default_theta_grid(int count = 37);

/// Maximum of the indicator; the grid must cover [0.05, pi - 0.05] with step <= pi/36.
double type_estimate(const IndicatorProfile& indicator);

struct DensityEstimate {
  WedgeRegion wedge;
  double delta = 0.0;         ///< slope of the counting function against r
  double slope_stderr = 0.0;
  int zeros_in_fit = 0;
  bool insufficient = false;  ///< fewer than 5 zeros in [r1/3, r1]
};

DensityEstimate density_estimate(const SpectrumReport& report, const WedgeRegion& wedge);

/// Genus-one product prod (1 - z/z_n) e^{z/z_n} over the supplied zeros and their
/// reflections (each distinct point once), in ascending |z_n|. Returns 0 when z is
/// within 1e-10 of a zero.
cplx hadamard_truncated(std::span<const cplx> zeros, cplx z);
/// ln|hadamard_truncated(zeros, z)|, summed factor by factor.
double hadamard_log_abs(std::span<const cplx> zeros, cplx z);

struct CartwrightCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double expected = 0.0;
  std::string note;
};

struct CartwrightDiagnostic {
  double type = 0.0;
  double near_axis_delta = 0.0;
  double off_axis_delta = 0.0;
  bool insufficient_data = false;
  std::vector<CartwrightCheck> checks;  ///< off-axis density, on-axis density, Hadamard growth
  bool all_passed() const;
};

inline constexpr double kNearAxisHalfWidth = 0.2;
inline constexpr double kOffAxisMargin = 0.3;

/// Checks (i) off-axis density <= 0.01, (ii) near-axis density within 25% of type/pi,
/// (iii) ln|hadamard| along the imaginary axis grows with slope within 25% of pi * delta.
CartwrightDiagnostic cartwright_check(const SpectrumReport& report,
                                      const IndicatorProfile& indicator);

nlohmann::json to_json(const CartwrightDiagnostic& diag);

}  // namespace tte
