#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <doctest.h>

#include "tte/determinant.hpp"
#include "tte/error.hpp"
#include "tte/profile.hpp"

using namespace tte;

namespace {

// d_0 for sqrt(n) == 2 on the unit ball.
cplx d0_constant2(cplx k) {
  return (2.0 * std::sin(k) * std::cos(2.0 * k) - std::cos(k) * std::sin(2.0 * k)) / (2.0 * k);
}

}  // namespace

TEST_SUITE("determinant") {
  TEST_CASE("unit medium is degenerate") {
    const Profile p = Profile::unit();
    for (cplx k : {cplx(0.5), cplx(13.0), cplx(40.0), cplx(0.0, 20.0), cplx(9.0, 4.0)}) {
      const auto d = d0(p, k);
      CAPTURE(k);
      CHECK(std::abs(d.value) <= 1e-8 * d.term_scale);
    }
  }

  TEST_CASE("constant medium closed form") {
    const Profile p = Profile::constant(2.0);
    for (cplx k : {cplx(1.3), cplx(8.0, 0.5), cplx(0.0, 6.0), cplx(25.0, -2.0)}) {
      const auto d = d0(p, k);
      const cplx want = d0_constant2(k);
      CAPTURE(k);
      CHECK(std::abs(d.value - want) <= 1e-9 * d.term_scale);
      CHECK(d.log_abs == doctest::Approx(std::log(std::abs(want))).epsilon(1e-6));
    }
  }

  TEST_CASE("derivative against central differences") {
    const Profile p = Profile::sqrt_cosine(0.5);
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> mod(1.0, 30.0), arg(0.0, 2.0 * std::numbers::pi);
    const double h = 1e-4;
    for (int i = 0; i < 8; ++i) {
      const cplx k = std::polar(mod(gen), arg(gen));
      const auto d = d0(p, k);
      REQUIRE(d.derivative.has_value());
      const cplx fd = (d0(p, k + h, {}, false).value - d0(p, k - h, {}, false).value) / (2.0 * h);
      CHECK(std::abs(*d.derivative - fd) <= 1e-6 * std::abs(*d.derivative));
    }
  }

  TEST_CASE("d_0 is even and conjugate symmetric") {
    const Profile p = Profile::sqrt_cosine(0.3);
    const cplx k(11.0, 1.5);
    const cplx v = d0(p, k).value;
    CHECK(std::abs(d0(p, -k).value - v) <= 1e-9 * std::abs(v));
    CHECK(std::abs(d0(p, std::conj(k)).value - std::conj(v)) <= 1e-9 * std::abs(v));
  }

  TEST_CASE("log modulus survives overflow") {
    const Profile p = Profile::sqrt_cosine(0.5);
    const auto d = d0(p, cplx(10.0, 300.0), {}, false);
    CHECK(std::isfinite(d.log_abs));
    CHECK(d.log_abs > 300.0);
  }

  TEST_CASE("small k uses the sinc series") {
    const Profile p = Profile::constant(2.0);
    const cplx k(1e-4, 0.0);
    CHECK(std::abs(d0(p, k).value - d0_constant2(k)) <= 1e-12);
  }

  TEST_CASE("higher angular index in the unit medium vanishes") {
    const Profile p = Profile::unit();
    for (int l = 1; l <= 3; ++l) {
      const auto d = dl(p, cplx(9.0, 0.7), l);
      CHECK(std::abs(d.value) <= 1e-7 * d.term_scale);
    }
    CHECK_THROWS_AS(dl(p, 2.0, 0), ValidationError);
    CHECK_THROWS_AS(dl(p, 2.0, 9), ValidationError);
  }

  TEST_CASE("normalized residual follows the real-axis law") {
    const Profile p = Profile::sqrt_cosine(0.5);
    for (double k : {100.0, 150.0, 200.0}) CHECK(normalized_residual(p, k) <= 0.1);
    CHECK_THROWS_AS(normalized_residual(Profile::constant(2.0), 100.0), ValidationError);
  }
}
