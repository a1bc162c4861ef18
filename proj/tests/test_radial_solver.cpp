#include <cmath>
#include <complex>

#include <doctest.h>

#include "tte/error.hpp"
#include "tte/profile.hpp"
#include "tte/radial_solver.hpp"

using namespace tte;

TEST_SUITE("radial_solver") {
  TEST_CASE("constant medium matches sin(ck)/(ck)") {
    const Profile p = Profile::constant(2.0);
    for (cplx k : {cplx(1.0, 0.0), cplx(7.5, 0.0), cplx(12.0, 4.0), cplx(0.0, 9.0), cplx(-3.0, 2.0)}) {
      const auto t = solve_radial(p, k, 0);
      const cplx y = std::sin(2.0 * k) / (2.0 * k);
      const cplx yp = std::cos(2.0 * k);
      CAPTURE(k);
      CHECK(std::abs(t.y_a - y) <= 1e-9 * std::abs(y));
      CHECK(std::abs(t.yp_a - yp) <= 1e-9 * std::abs(yp));
      REQUIRE(t.dy_a.has_value());
      // d/dk sin(2k)/(2k) = cos(2k)/k - sin(2k)/(2k^2).
      const cplx dy = std::cos(2.0 * k) / k - std::sin(2.0 * k) / (2.0 * k * k);
      CHECK(std::abs(*t.dy_a - dy) <= 1e-8 * (std::abs(dy) + std::abs(y)));
      const cplx dyp = -2.0 * std::sin(2.0 * k);
      CHECK(std::abs(*t.dyp_a - dyp) <= 1e-8 * (std::abs(dyp) + std::abs(yp)));
    }
  }

  TEST_CASE("k = 0 gives y = r") {
    const auto t = solve_radial(Profile::sqrt_cosine(0.5), 0.0, 0);
    CHECK(std::abs(t.y_a - 1.0) <= 1e-12);
    CHECK(std::abs(t.yp_a - 1.0) <= 1e-12);
  }

  TEST_CASE("l >= 1 in the unit medium is proportional to r j_l(kr)") {
    const Profile p = Profile::unit();
    const cplx k(6.0, 1.0);
    for (int l = 1; l <= 4; ++l) {
      const auto t = solve_radial(p, k, l);
      const auto b = sph_bessel(l, k);
      // Y and its derivative must be a common multiple of (j_l(k), k j_l'(k)).
      const cplx cross = t.y_a * k * b.derivative - t.yp_a * b.value;
      CHECK(std::abs(cross) <= 1e-8 * std::abs(t.y_a) * std::abs(k * b.derivative));
      CHECK_FALSE(t.dy_a.has_value());
    }
  }

  TEST_CASE("solutions are conjugate symmetric") {
    const Profile p = Profile::sqrt_cosine(0.3);
    const cplx k(17.0, 2.5);
    const auto t = solve_radial(p, k, 0);
    const auto c = solve_radial(p, std::conj(k), 0);
    CHECK(std::abs(c.y_a - std::conj(t.y_a)) <= 1e-10 * std::abs(t.y_a));
  }

  TEST_CASE("tightening the tolerance changes little") {
    const Profile p = Profile::sqrt_cosine(0.5);
    const cplx k(40.0, 1.0);
    const auto loose = solve_radial(p, k, 0);
    const auto tight = solve_radial(p, k, 0, SolverOptions{}.tightened(100.0));
    CHECK(std::abs(loose.y_a - tight.y_a) <= 1e-8 * std::abs(tight.y_a));
    CHECK(tight.steps >= loose.steps);
  }

  TEST_CASE("wavenumber guard") {
    const Profile p = Profile::unit();
    CHECK_THROWS_AS(solve_radial(p, 600.0, 0), ValidationError);
    CHECK_THROWS_AS(solve_radial(p, 5.0, 9), ValidationError);
    CHECK_THROWS_AS(solve_radial(p, 5.0, -1), ValidationError);
  }

  TEST_CASE("asymptotic approximants") {
    const Profile p = Profile::sqrt_cosine(0.5);
    CHECK(asymptotic_boundary(p, 5.0).below_regime);
    const double k = 120.0;
    const auto a = asymptotic_boundary(p, k);
    CHECK_FALSE(a.below_regime);
    const auto t = solve_radial(p, k, 0);
    CHECK(std::abs(t.yp_a - a.yp) <= 0.05);
    CHECK(std::abs(t.y_a - a.y) * k <= 0.05);
  }
}
