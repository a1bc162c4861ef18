#include "tte/profile.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

// Boost 1.74's pchip.hpp calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "tte/error.hpp"

namespace tte {

namespace {

constexpr int kPositivityScanPoints = 1000;
constexpr double kStrictBoundaryTol = 1e-9;
constexpr int kMaxQuadratureDepth = 40;

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

double adaptive_gauss(const Profile& p, double lo, double hi, double whole, double tol,
                      int depth) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  auto f = [&p](double r) { return p.sqrt_n(r); };
  const double mid = 0.5 * (lo + hi);
  const double left = Rule::integrate(f, lo, mid);
  const double right = Rule::integrate(f, mid, hi);
  if (std::abs(left + right - whole) <= tol) return left + right;
  if (depth >= kMaxQuadratureDepth) {
    throw NumericalError(
        fmt::format("travel-time quadrature did not converge on [{}, {}]", lo, hi));
  }
  return adaptive_gauss(p, lo, mid, left, 0.5 * tol, depth + 1) +
         adaptive_gauss(p, mid, hi, right, 0.5 * tol, depth + 1);
}

double require_number(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw ValidationError(fmt::format("profile: missing numeric field '{}'", key));
  }
  return obj.at(key).get<double>();
}

std::vector<double> require_array(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_array()) {
    throw ValidationError(fmt::format("profile: missing array field '{}'", key));
  }
  std::vector<double> out;
  for (const auto& v : obj.at(key)) {
    if (!v.is_number()) throw ValidationError(fmt::format("profile: '{}' must hold numbers", key));
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

struct Profile::Table {
  std::vector<double> r;
  std::vector<double> sqrt_n;
  Pchip interpolant;
};

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::unit: return "unit";
    case ProfileKind::constant: return "constant";
    case ProfileKind::sqrt_cosine: return "sqrt_cosine";
    case ProfileKind::polynomial: return "polynomial";
    case ProfileKind::table: return "table";
  }
  return "unknown";
}

std::string to_string(SignClass sign) {
  switch (sign) {
    case SignClass::a_greater_b: return "a>b";
    case SignClass::a_less_b: return "a<b";
    case SignClass::a_equals_b: return "a=b";
  }
  return "unknown";
}

SignClass sign_class_from_string(std::string_view text) {
  if (text == "a>b") return SignClass::a_greater_b;
  if (text == "a<b") return SignClass::a_less_b;
  if (text == "a=b") return SignClass::a_equals_b;
  throw ValidationError(fmt::format("unknown sign class '{}'", text));
}

Profile::Profile(ProfileKind kind, double a, bool strict) : kind_(kind), a_(a), strict_(strict) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ValidationError(fmt::format("profile radius must be positive, got {}", a));
  }
}

Profile Profile::unit(double a) {
  Profile p(ProfileKind::unit, a, true);
  p.validate();
  return p;
}

Profile Profile::constant(double c, double a, bool strict) {
  Profile p(ProfileKind::constant, a, strict);
  p.coeffs_ = {c};
  p.validate();
  return p;
}

Profile Profile::sqrt_cosine(double beta, double a, bool strict) {
  Profile p(ProfileKind::sqrt_cosine, a, strict);
  p.coeffs_ = {beta};
  p.validate();
  return p;
}

Profile Profile::polynomial(std::vector<double> coeffs, double a, bool strict) {
  if (coeffs.empty()) throw ValidationError("polynomial profile needs at least one coefficient");
  Profile p(ProfileKind::polynomial, a, strict);
  p.coeffs_ = std::move(coeffs);
  p.validate();
  return p;
}

Profile Profile::table(std::vector<double> r, std::vector<double> sqrt_n, bool strict) {
  if (r.size() != sqrt_n.size()) {
    throw ValidationError("table profile: 'r' and 'sqrt_n' differ in length");
  }
  if (r.size() < 4) throw ValidationError("table profile: need at least four samples");
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) {
      throw ValidationError("table profile: sample radii must be strictly increasing");
    }
  }
  if (r.front() != 0.0) throw ValidationError("table profile: first sample radius must be 0");
  Profile p(ProfileKind::table, r.back(), strict);
  auto xs = r;
  auto ys = sqrt_n;
  p.table_ = std::make_shared<const Table>(
      Table{std::move(r), std::move(sqrt_n), Pchip(std::move(xs), std::move(ys))});
  p.validate();
  return p;
}

double Profile::eval_unchecked(double r) const {
  switch (kind_) {
    case ProfileKind::unit: return 1.0;
    case ProfileKind::constant: return coeffs_[0];
    case ProfileKind::sqrt_cosine:
      return 1.0 + coeffs_[0] * std::cos(std::numbers::pi * r / (2.0 * a_));
    case ProfileKind::polynomial: {
      double acc = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * r + *it;
      return acc;
    }
    case ProfileKind::table: return table_->interpolant(r);
  }
  return 0.0;
}

double Profile::sqrt_n(double r) const {
  if (!(r >= 0.0 && r <= a_)) {
    throw ValidationError(fmt::format("radius {} outside [0, {}]", r, a_));
  }
  return eval_unchecked(r);
}

double Profile::n(double r) const {
  const double s = sqrt_n(r);
  return s * s;
}

void Profile::validate() const {
  for (int i = 0; i <= kPositivityScanPoints; ++i) {
    const double r = a_ * static_cast<double>(i) / kPositivityScanPoints;
    const double v = eval_unchecked(r);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError(
          fmt::format("profile: n(r) must be positive, sqrt(n({})) = {}", r, v));
    }
  }
  if (strict_) {
    const double na = n(a_);
    if (std::abs(na - 1.0) > kStrictBoundaryTol) {
      throw ValidationError(fmt::format("profile: strict mode requires n(a) = 1, got {}", na));
    }
  }
}

nlohmann::json Profile::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  switch (kind_) {
    case ProfileKind::unit: break;
    case ProfileKind::constant: params["c"] = coeffs_[0]; break;
    case ProfileKind::sqrt_cosine: params["beta"] = coeffs_[0]; break;
    case ProfileKind::polynomial: params["coefficients"] = coeffs_; break;
    case ProfileKind::table:
      params["r"] = table_->r;
      params["sqrt_n"] = table_->sqrt_n;
      break;
  }
  return {{"a", a_}, {"kind", to_string(kind_)}, {"params", params}, {"strict", strict_}};
}

std::string Profile::hash() const {
  // FNV-1a over the canonical (key-sorted) dump.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

Profile parse_profile(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("profile: document must be a JSON object");
  if (!doc.contains("kind") || !doc.at("kind").is_string()) {
    throw ValidationError("profile: missing string field 'kind'");
  }
  const auto kind = doc.at("kind").get<std::string>();
  const nlohmann::json params = doc.value("params", nlohmann::json::object());
  if (!params.is_object()) throw ValidationError("profile: 'params' must be an object");
  bool strict = true;
  if (doc.contains("strict")) {
    if (!doc.at("strict").is_boolean()) throw ValidationError("profile: 'strict' must be a bool");
    strict = doc.at("strict").get<bool>();
  }
  // Scalar parameters may sit either in "params" or at the top level.
  auto scalar = [&](const char* key) {
    return params.contains(key) ? require_number(params, key) : require_number(doc, key);
  };

  if (kind == "table") {
    auto r = require_array(params, "r");
    auto s = require_array(params, "sqrt_n");
    if (doc.contains("a") && !r.empty() && std::abs(require_number(doc, "a") - r.back()) > 0.0) {
      throw ValidationError("table profile: 'a' must equal the last sample radius");
    }
    return Profile::table(std::move(r), std::move(s), strict);
  }
  const double a = require_number(doc, "a");
  if (kind == "unit") return Profile::unit(a);
  if (kind == "constant") return Profile::constant(scalar("c"), a, strict);
  if (kind == "sqrt_cosine") return Profile::sqrt_cosine(scalar("beta"), a, strict);
  if (kind == "polynomial") {
    const auto& src = params.contains("coefficients") ? params : doc;
    return Profile::polynomial(require_array(src, "coefficients"), a, strict);
  }
  throw ValidationError(fmt::format("profile: unknown kind '{}'", kind));
}

Profile parse_profile(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(fmt::format("profile: malformed JSON ({})", e.what()));
  }
  return parse_profile(doc);
}

Profile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read profile '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_profile(std::string_view(buf.str()));
}

DerivedScales travel_time(const Profile& profile, double tol) {
  const double a = profile.radius();
  using Rule = boost::math::quadrature::gauss<double, 10>;
  const double whole = Rule::integrate([&](double r) { return profile.sqrt_n(r); }, 0.0, a);
  DerivedScales out;
  out.b = adaptive_gauss(profile, 0.0, a, whole, tol, 0);
  out.s = a - out.b;
  out.n0 = profile.n(0.0);
  // Defects below the quadrature tolerance are indistinguishable from zero.
  if (std::abs(out.s) <= 10.0 * tol) {
    out.sign_class = SignClass::a_equals_b;
  } else {
    out.sign_class = out.s > 0.0 ? SignClass::a_greater_b : SignClass::a_less_b;
  }
  return out;
}

}  // namespace tte
