#include <cmath>
#include <numbers>

#include <doctest.h>

#include "tte/error.hpp"
#include "tte/profile.hpp"

using namespace tte;

TEST_SUITE("profile") {
  TEST_CASE("parse unit, constant and sqrt_cosine documents") {
    const Profile unit = parse_profile(std::string_view(R"({"kind": "unit", "a": 1})"));
    CHECK(unit.kind() == ProfileKind::unit);
    CHECK(unit.n(0.3) == 1.0);

    const Profile c2 =
        parse_profile(std::string_view(R"({"kind": "constant", "a": 1, "params": {"c": 2}, "strict": false})"));
    CHECK(c2.n(0.7) == 4.0);
    CHECK_THROWS_AS(
        parse_profile(std::string_view(R"({"kind": "constant", "a": 1, "params": {"c": 2}})")),
        ValidationError);

    const Profile sc =
        parse_profile(std::string_view(R"({"kind": "sqrt_cosine", "a": 1, "params": {"beta": 0.5}})"));
    CHECK(sc.n(0.0) == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(sc.n(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sc.sqrt_n(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("schema and positivity errors") {
    CHECK_THROWS_AS(parse_profile(std::string_view("not json")), ValidationError);
    CHECK_THROWS_AS(parse_profile(std::string_view(R"({"a": 1})")), ValidationError);
    CHECK_THROWS_AS(parse_profile(std::string_view(R"({"kind": "blob", "a": 1})")), ValidationError);
    CHECK_THROWS_AS(parse_profile(std::string_view(R"({"kind": "unit", "a": -1})")), ValidationError);
    // sqrt(n) = 1 - 2r changes sign on [0, 1].
    CHECK_THROWS_AS(Profile::polynomial({1.0, -2.0}, 1.0, false), ValidationError);
    CHECK_THROWS_AS(Profile::sqrt_cosine(-1.5), ValidationError);
  }

  TEST_CASE("eval_sqrt_n domain") {
    const Profile p = Profile::constant(2.0);
    CHECK(p.sqrt_n(0.0) == 2.0);
    CHECK(p.sqrt_n(1.0) == 2.0);
    CHECK_THROWS_AS(p.sqrt_n(1.0000001), ValidationError);
    CHECK_THROWS_AS(p.sqrt_n(-0.1), ValidationError);
  }

  TEST_CASE("travel time closed forms") {
    const auto unit = travel_time(Profile::unit(1.0));
    CHECK(std::abs(unit.b - 1.0) <= 1e-12);
    CHECK(unit.s == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(unit.sign_class == SignClass::a_equals_b);

    const auto c2 = travel_time(Profile::constant(2.0, 1.0));
    CHECK(std::abs(c2.b - 2.0) <= 1e-12);
    CHECK(std::abs(c2.s + 1.0) <= 1e-12);

    // int_0^1 (1 + 0.5 cos(pi r / 2)) dr = 1 + 1/pi.
    const auto sc = travel_time(Profile::sqrt_cosine(0.5));
    CHECK(std::abs(sc.b - (1.0 + 1.0 / std::numbers::pi)) <= 1e-12);
    CHECK(sc.s == -(sc.b - 1.0));
    CHECK(sc.n0 == doctest::Approx(2.25));
    CHECK(sc.sign_class == SignClass::a_less_b);
    const auto sc3 = travel_time(Profile::sqrt_cosine(0.3));
    CHECK(std::abs(sc3.b - (1.0 + 0.6 / std::numbers::pi)) <= 1e-12);
    const auto below = travel_time(Profile::sqrt_cosine(-0.4));
    CHECK(below.sign_class == SignClass::a_greater_b);
  }

  TEST_CASE("scaling b = c a for constant profiles") {
    for (double c : {0.5, 1.5, 3.0}) {
      for (double a : {0.25, 1.0, 4.0}) {
        CHECK(std::abs(travel_time(Profile::constant(c, a)).b - c * a) <= 1e-12);
      }
    }
  }

  TEST_CASE("quadrature stability under tolerance halving") {
    const Profile p = Profile::polynomial({1.8, 0.0, -0.8}, 1.0);
    const double b1 = travel_time(p, 1e-10).b;
    const double b2 = travel_time(p, 5e-11).b;
    CHECK(std::abs(b1 - b2) < 10 * 1e-10);
    CHECK(std::abs(b1 - (1.8 - 0.8 / 3.0)) <= 1e-10);
  }

  TEST_CASE("polynomial and table profiles") {
    // sqrt(n) = 1.5 - 0.5 r^2: strict, n(a) = 1.
    const Profile poly = Profile::polynomial({1.5, 0.0, -0.5}, 1.0);
    CHECK(poly.sqrt_n(0.5) == doctest::Approx(1.375));

    std::vector<double> r, s;
    for (int i = 0; i <= 40; ++i) {
      r.push_back(i / 40.0);
      s.push_back(1.5 - 0.5 * r.back() * r.back());
    }
    const Profile table = Profile::table(r, s);
    CHECK(table.radius() == 1.0);
    CHECK(table.sqrt_n(0.5) == doctest::Approx(1.375).epsilon(1e-4));
    CHECK(travel_time(table).b == doctest::Approx(1.5 - 0.5 / 3.0).epsilon(1e-5));

    CHECK_THROWS_AS(Profile::table({0.0, 0.5, 0.4, 1.0}, {2, 2, 2, 1}), ValidationError);
    CHECK_THROWS_AS(Profile::table({0.1, 0.5, 0.7, 1.0}, {2, 2, 2, 1}), ValidationError);
    CHECK_THROWS_AS(Profile::table({0.0, 0.5, 1.0}, {2, 2, 1}), ValidationError);
    CHECK_THROWS_AS(Profile::table({0.0, 0.3, 0.6, 1.0}, {2, -1, 2, 1}), ValidationError);

    const Profile parsed = parse_profile(table.to_json());
    CHECK(parsed.hash() == table.hash());
  }

  TEST_CASE("hash is stable and distinguishes profiles") {
    CHECK(Profile::sqrt_cosine(0.5).hash() == Profile::sqrt_cosine(0.5).hash());
    CHECK(Profile::sqrt_cosine(0.5).hash() != Profile::sqrt_cosine(0.3).hash());
    CHECK(parse_profile(Profile::sqrt_cosine(0.5).to_json()).hash() ==
          Profile::sqrt_cosine(0.5).hash());
  }
}
