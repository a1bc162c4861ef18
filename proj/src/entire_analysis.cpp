#include "tte/entire_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "tte/determinant.hpp"
#include "tte/error.hpp"
#include "tte/parallel.hpp"

namespace tte {

namespace {

constexpr double kRealAxisGuard = 0.05;
constexpr int kDensityGridPoints = 300;
constexpr int kMinZerosForDensity = 5;
constexpr double kOffAxisDensityBound = 0.01;
constexpr double kRelativeBand = 0.25;

struct GrowthFit {
  double slope = 0.0;
  double rms = 0.0;
};

// ln|f| = h t + c1 ln t + c0 on a geometric grid.
GrowthFit fit_growth(const std::function<double(double)>& log_abs, double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo) || n < 4) {
    throw ValidationError(fmt::format("growth fit needs 0 < lo < hi and >= 4 radii ({}, {}, {})",
                                      lo, hi, n));
  }
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const double t = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    const double v = log_abs(t);
    if (!std::isfinite(v)) {
      throw NumericalError(fmt::format("growth fit: ln|f| not finite at radius {}", t));
    }
    design(i, 0) = t;
    design(i, 1) = std::log(t);
    design(i, 2) = 1.0;
    rhs(i) = v;
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd resid = design * coef - rhs;
  return {coef(0), std::sqrt(resid.squaredNorm() / n)};
}

struct LineFit {
  double slope = 0.0;
  double stderr_ = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - my - slope * (x[i] - mx);
    ssr += e * e;
  }
  return {slope, std::sqrt(ssr / (n - 2.0) / sxx)};
}

std::vector<cplx> orbit_points(std::span<const cplx> zeros) {
  std::vector<cplx> pts;
  for (cplx z : zeros) {
    if (z == cplx(0.0)) throw ValidationError("Hadamard product: zeros must be nonzero");
    for (cplx w : reflections(z)) pts.push_back(w);
  }
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma < mb;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

LogModulus make_d0_log_modulus(const Profile& profile, const SolverOptions& opts) {
  return [profile, opts](cplx z) { return d0(profile, z, opts, false).log_abs; };
}

LogModulus sinc_log_modulus() {
  return [](cplx z) {
    // |sin z| = e^{|Im z|} |sin z| e^{-|Im z|}, the second factor bounded.
    const double y = std::abs(z.imag());
    const double e = std::exp(-2.0 * y);
    const double re = std::sin(z.real()) * 0.5 * (1.0 + e);
    const double im = std::cos(z.real()) * 0.5 * (1.0 - e);
    return y + std::log(std::hypot(re, im)) - std::log(std::abs(z));
  };
}

IndicatorFit indicator_estimate(const LogModulus& f, double theta, double r_lo, double r_hi,
                                int radii) {
  if (std::abs(std::sin(theta)) < std::sin(kRealAxisGuard)) return {0.0, 0.0, true};
  const cplx dir = std::polar(1.0, theta);
  const GrowthFit fit = fit_growth([&](double r) { return f(r * dir); }, r_lo, r_hi, radii);
  return {fit.slope, fit.rms, false};
}

IndicatorFit indicator_estimate(const Profile& profile, double theta, double r_lo, double r_hi,
                                const SolverOptions& opts) {
  if (!profile.strict()) {
    throw ValidationError("indicator estimation requires a strict profile (n(a) = 1)");
  }
  if (r_hi > opts.k_max) {
    throw ValidationError(fmt::format("r_hi = {} exceeds k_max = {}", r_hi, opts.k_max));
  }
  return indicator_estimate(make_d0_log_modulus(profile, opts), theta, r_lo, r_hi);
}

IndicatorProfile indicator_profile(const LogModulus& f, std::span<const double> thetas,
                                   double r_lo, double r_hi, int radii) {
  IndicatorProfile out;
  out.theta_grid.assign(thetas.begin(), thetas.end());
  out.h_values.resize(thetas.size());
  out.fit_residuals.resize(thetas.size());
  out.fit_windows.assign(thetas.size(), {r_lo, r_hi});
  parallel_for(thetas.size(), [&](std::size_t i) {
    const IndicatorFit fit = indicator_estimate(f, thetas[i], r_lo, r_hi, radii);
    out.h_values[i] = fit.h;
    out.fit_residuals[i] = fit.residual;
  });
  return out;
}

std::vector<double> default_theta_grid(int count) {
  std::vector<double> grid(count);
  const double lo = kRealAxisGuard;
  const double hi = std::numbers::pi - kRealAxisGuard;
  for (int i = 0; i < count; ++i) grid[i] = lo + (hi - lo) * i / (count - 1);
  return grid;
}

double type_estimate(const IndicatorProfile& indicator) {
  auto grid = indicator.theta_grid;
  if (grid.empty() || grid.size() != indicator.h_values.size()) {
    throw ValidationError("type estimate: indicator grid is empty or inconsistent");
  }
  std::sort(grid.begin(), grid.end());
  constexpr double eps = 1e-9;
  if (grid.front() > kRealAxisGuard + eps || grid.back() < std::numbers::pi - kRealAxisGuard - eps) {
    throw ValidationError("type estimate: theta grid must cover [0.05, pi - 0.05]");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] - grid[i - 1] > std::numbers::pi / 36.0 + eps) {
      throw ValidationError("type estimate: theta grid step exceeds pi/36");
    }
  }
  return *std::max_element(indicator.h_values.begin(), indicator.h_values.end());
}

DensityEstimate density_estimate(const SpectrumReport& report, const WedgeRegion& wedge) {
  DensityEstimate out;
  out.wedge = wedge;
  const double hi = wedge.r1;
  const double lo = hi / 3.0;
  std::vector<double> rs(kDensityGridPoints), counts(kDensityGridPoints);
  for (int i = 0; i < kDensityGridPoints; ++i) {
    rs[i] = lo + (hi - lo) * i / (kDensityGridPoints - 1);
    counts[i] = counting_function(report, rs[i], wedge.alpha, wedge.beta);
  }
  out.zeros_in_fit = static_cast<int>(counts.back() - counting_function(report, std::nextafter(lo, 0.0),
                                                                        wedge.alpha, wedge.beta));
  const LineFit fit = fit_line(rs, counts);
  out.delta = std::max(0.0, fit.slope);
  out.slope_stderr = fit.stderr_;
  out.insufficient = out.zeros_in_fit < kMinZerosForDensity;
  return out;
}

cplx hadamard_truncated(std::span<const cplx> zeros, cplx z) {
  cplx product = 1.0;
  for (cplx w : orbit_points(zeros)) {
    if (std::abs(z - w) < 1e-10) return 0.0;
    const cplx q = z / w;
    product *= (1.0 - q) * std::exp(q);
  }
  return product;
}

double hadamard_log_abs(std::span<const cplx> zeros, cplx z) {
  double acc = 0.0;
  for (cplx w : orbit_points(zeros)) {
    if (std::abs(z - w) < 1e-10) return -std::numeric_limits<double>::infinity();
    const cplx q = z / w;
    acc += std::log(std::abs(1.0 - q)) + q.real();
  }
  return acc;
}

bool CartwrightDiagnostic::all_passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

CartwrightDiagnostic cartwright_check(const SpectrumReport& report,
                                      const IndicatorProfile& indicator) {
  CartwrightDiagnostic diag;
  CartwrightCheck off{"off_axis_density", false, 0.0, 0.0, ""};
  CartwrightCheck on{"near_axis_density", false, 0.0, 0.0, ""};
  CartwrightCheck growth{"hadamard_growth", false, 0.0, 0.0, ""};

  if (indicator.h_values.empty()) {
    diag.insufficient_data = true;
  } else {
    try {
      diag.type = type_estimate(indicator);
    } catch (const ValidationError&) {
      diag.type = *std::max_element(indicator.h_values.begin(), indicator.h_values.end());
      on.note = "indicator grid does not meet the type-estimate requirements; ";
    }
  }
  if (report.zeros.empty()) diag.insufficient_data = true;
  if (diag.insufficient_data) {
    for (auto* c : {&off, &on, &growth}) c->note = "insufficient data";
    diag.checks = {off, on, growth};
    return diag;
  }

  const double r0 = report.region.r0;
  const double r1 = report.region.r1;
  try {
    const auto d = density_estimate(report, {r0, r1, kOffAxisMargin, std::numbers::pi - kOffAxisMargin});
    diag.off_axis_delta = d.delta;
    off.measured = d.delta;
    off.expected = 0.0;
    off.passed = d.delta <= kOffAxisDensityBound;
    off.note = fmt::format("bound {}; {} zeros in fit range", kOffAxisDensityBound, d.zeros_in_fit);
  } catch (const ValidationError& e) {
    off.note = fmt::format("not covered by the report: {}", e.what());
  }

  try {
    const auto d = density_estimate(report, {r0, r1, -kNearAxisHalfWidth, kNearAxisHalfWidth});
    diag.near_axis_delta = d.delta;
    on.measured = d.delta;
    on.expected = diag.type / std::numbers::pi;
    on.passed = !d.insufficient && std::abs(d.delta - on.expected) <= kRelativeBand * on.expected;
    on.note += fmt::format("stderr {}; {} zeros in fit range", d.slope_stderr, d.zeros_in_fit);
  } catch (const ValidationError& e) {
    on.note += fmt::format("not covered by the report: {}", e.what());
  }

  if (diag.near_axis_delta > 0.0) {
    std::vector<cplx> zs;
    for (const auto& z : report.zeros) {
      for (int m = 0; m < z.multiplicity; ++m) zs.push_back(z.location);
    }
    const auto pts = orbit_points(zs);
    const GrowthFit fit = fit_growth(
        [&](double t) { return hadamard_log_abs(pts, cplx(0.0, t)); }, r1 / 40.0, r1 / 8.0, 40);
    growth.measured = fit.slope;
    growth.expected = std::numbers::pi * diag.near_axis_delta;
    growth.passed = std::abs(fit.slope - growth.expected) <= kRelativeBand * growth.expected;
    growth.note = fmt::format("fit over t in [{}, {}], rms {}", r1 / 40.0, r1 / 8.0, fit.rms);
  } else {
    growth.note = "no near-axis density to compare against";
  }
  diag.checks = {off, on, growth};
  return diag;
}

nlohmann::json to_json(const CartwrightDiagnostic& diag) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : diag.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"measured", c.measured},
                      {"expected", c.expected},
                      {"note", c.note}});
  }
  return {{"type", diag.type},
          {"near_axis_delta", diag.near_axis_delta},
          {"off_axis_delta", diag.off_axis_delta},
          {"insufficient_data", diag.insufficient_data},
          {"all_passed", diag.all_passed()},
          {"checks", checks}};
}

}  // namespace tte
