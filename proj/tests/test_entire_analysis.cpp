#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "tte/entire_analysis.hpp"
#include "tte/error.hpp"

using namespace tte;

namespace {

constexpr double kPi = std::numbers::pi;

SpectrumReport sine_report(double r1) {
  AnalyticFunction f;
  f.value = [](cplx z) { return std::sin(z) / z; };
  return find_zeros(f, {0.5, r1, 0.0, 0.5 * kPi});
}

}  // namespace

TEST_SUITE("entire_analysis") {
  TEST_CASE("indicator of sin(z)/z is |sin theta|") {
    const auto ln = sinc_log_modulus();
    for (double theta : {0.3, 1.0, 0.5 * kPi, 2.5}) {
      const auto fit = indicator_estimate(ln, theta, 50.0, 300.0);
      CAPTURE(theta);
      CHECK(fit.h == doctest::Approx(std::abs(std::sin(theta))).epsilon(1e-6));
      CHECK_FALSE(fit.real_axis);
    }
    const auto axis = indicator_estimate(ln, 0.01, 50.0, 300.0);
    CHECK(axis.real_axis);
    CHECK(axis.h == 0.0);
  }

  TEST_CASE("type estimate over the default grid") {
    const auto grid = default_theta_grid();
    CHECK(grid.size() == 37);
    CHECK(grid.front() == doctest::Approx(0.05));
    CHECK(grid.back() == doctest::Approx(kPi - 0.05));
    const auto ind = indicator_profile(sinc_log_modulus(), grid, 50.0, 300.0);
    CHECK(type_estimate(ind) == doctest::Approx(1.0).epsilon(1e-6));

    IndicatorProfile coarse = indicator_profile(sinc_log_modulus(), default_theta_grid(10), 50.0, 300.0);
    CHECK_THROWS_AS(type_estimate(coarse), ValidationError);
    const std::vector<double> narrow{0.5, 0.55, 0.6};
    CHECK_THROWS_AS(type_estimate(indicator_profile(sinc_log_modulus(), narrow, 50.0, 300.0)),
                    ValidationError);
  }

  TEST_CASE("fit argument validation") {
    CHECK_THROWS_AS(indicator_estimate(sinc_log_modulus(), 1.0, 0.0, 10.0), ValidationError);
    CHECK_THROWS_AS(indicator_estimate(sinc_log_modulus(), 1.0, 20.0, 10.0), ValidationError);
    CHECK_THROWS_AS(indicator_estimate(Profile::constant(2.0), 1.0, 10.0, 20.0), ValidationError);
    CHECK_THROWS_AS(indicator_estimate(Profile::sqrt_cosine(0.5), 1.0, 10.0, 600.0), ValidationError);
  }

  TEST_CASE("Hadamard product of the sine zeros") {
    std::vector<cplx> zeros;
    for (int n = 1; n <= 200; ++n) zeros.push_back(n * kPi);
    // prod (1 + 1/(n pi)^2) over n <= 200 approximates sinh(1).
    CHECK(std::abs(hadamard_truncated(zeros, cplx(0.0, 1.0)) - 1.1752011936438014569) <=
          0.01 * 1.1752011936438014569);
    CHECK(hadamard_log_abs(zeros, cplx(0.0, 1.0)) ==
          doctest::Approx(std::log(std::abs(hadamard_truncated(zeros, cplx(0.0, 1.0))))));
    CHECK(hadamard_truncated(zeros, 3.0 * kPi) == cplx(0.0));
    CHECK(std::isinf(hadamard_log_abs(zeros, -5.0 * kPi)));
    // Supplying a reflection twice does not double the factor.
    std::vector<cplx> doubled = zeros;
    for (int n = 1; n <= 200; ++n) doubled.push_back(-n * kPi);
    CHECK(hadamard_truncated(doubled, cplx(0.0, 1.0)) == hadamard_truncated(zeros, cplx(0.0, 1.0)));
    const std::vector<cplx> bad{0.0};
    CHECK_THROWS_AS(hadamard_truncated(bad, 1.0), ValidationError);
  }

  TEST_CASE("density of the sine zeros") {
    const auto report = sine_report(100.0);
    const auto d = density_estimate(report, {0.5, 100.0, -0.2, 0.2});
    CHECK_FALSE(d.insufficient);
    CHECK(d.delta == doctest::Approx(1.0 / kPi).epsilon(0.02));
    const auto off = density_estimate(report, {0.5, 100.0, 0.3, kPi - 0.3});
    CHECK(off.delta == 0.0);
    CHECK(off.insufficient);
  }

  TEST_CASE("Cartwright diagnostics on sin(z)/z") {
    const auto report = sine_report(100.0);
    const auto ind = indicator_profile(sinc_log_modulus(), default_theta_grid(), 50.0, 300.0);
    const auto diag = cartwright_check(report, ind);
    CHECK_FALSE(diag.insufficient_data);
    REQUIRE(diag.checks.size() == 3);
    for (const auto& c : diag.checks) {
      CAPTURE(c.name);
      CAPTURE(c.measured);
      CHECK(c.passed);
    }
    CHECK(diag.all_passed());
    CHECK(to_json(diag)["all_passed"] == true);
  }

  TEST_CASE("empty spectrum is insufficient data") {
    SpectrumReport empty;
    empty.region = {0.5, 10.0, 0.0, 0.5 * kPi};
    const auto ind = indicator_profile(sinc_log_modulus(), default_theta_grid(), 50.0, 300.0);
    const auto diag = cartwright_check(empty, ind);
    CHECK(diag.insufficient_data);
    CHECK_FALSE(diag.all_passed());
    for (const auto& c : diag.checks) CHECK(c.note == "insufficient data");
  }

  TEST_CASE("sqrt_cosine: imaginary-axis growth rate and its consistency with the zeros") {
    // Along the imaginary axis ln|d_0| grows like (a + b) t for this profile
    // (a + b = 2 + 1/pi), not like |a - b| t; see the README.
    const Profile p = Profile::sqrt_cosine(0.5);
    const double sum = 2.0 + 1.0 / kPi;
    const auto fit = indicator_estimate(p, 0.5 * kPi, 50.0, 300.0);
    CHECK(fit.h == doctest::Approx(sum).epsilon(0.02));

    // Zeros and growth still agree with each other: near-axis density (a + b)/pi.
    const auto report = find_d0_zeros(p, {0.5, 100.0, 0.0, 0.5 * kPi});
    const auto near = density_estimate(report, {0.5, 100.0, -0.2, 0.2});
    CHECK(near.delta == doctest::Approx(sum / kPi).epsilon(0.25));
    const auto off = density_estimate(report, {0.5, 100.0, 0.3, kPi - 0.3});
    CHECK(off.delta <= 0.01);
  }
}
