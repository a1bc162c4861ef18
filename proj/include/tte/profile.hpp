#pragma once

// Spherically symmetric refractive profiles n(r) on [0, a].
//
// Every profile is parameterized through sqrt(n): the radial equations, the
// travel time and the asymptotic approximants all consume sqrt(n) directly.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tte {

enum class ProfileKind { unit, constant, sqrt_cosine, polynomial, table };

/// Sign of the defect s = a - b.
enum class SignClass { a_greater_b, a_less_b, a_equals_b };

std::string to_string(ProfileKind kind);
std::string to_string(SignClass sign);
SignClass sign_class_from_string(std::string_view text);

struct DerivedScales {
  double b = 0.0;   ///< travel time, integral of sqrt(n) over [0, a]
  double s = 0.0;   ///< signed defect a - b
  double n0 = 0.0;  ///< n(0)
  SignClass sign_class = SignClass::a_equals_b;
};

class Profile {
 public:
  static Profile unit(double a = 1.0);
  /// sqrt(n) == c. Non-strict unless c == 1, since n(a) = c^2.
  static Profile constant(double c, double a = 1.0, bool strict = false);
  /// sqrt(n(r)) = 1 + beta * cos(pi r / (2a)); n(a) = 1, n(0) = (1 + beta)^2.
  static Profile sqrt_cosine(double beta, double a = 1.0, bool strict = true);
  /// sqrt(n(r)) = sum_j coeffs[j] r^j.
  static Profile polynomial(std::vector<double> coeffs, double a, bool strict = true);
  /// Piecewise cubic Hermite (PCHIP) interpolation of tabulated sqrt(n).
  /// The radius is the last sample radius.
  static Profile table(std::vector<double> r, std::vector<double> sqrt_n, bool strict = true);

  double radius() const noexcept { return a_; }
  ProfileKind kind() const noexcept { return kind_; }
  bool strict() const noexcept { return strict_; }

  /// sqrt(n(r)) for 0 <= r <= a; throws ValidationError outside.
  double sqrt_n(double r) const;
  double n(double r) const;

  /// Canonical JSON document (the schema accepted by parse_profile).
  nlohmann::json to_json() const;
  /// Stable hex digest of the canonical document.
  std::string hash() const;

 private:
  struct Table;

  Profile(ProfileKind kind, double a, bool strict);
  double eval_unchecked(double r) const;
  void validate() const;

  ProfileKind kind_;
  double a_;
  bool strict_;
  std::vector<double> coeffs_;  // constant: {c}; sqrt_cosine: {beta}; polynomial
  std::shared_ptr<const Table> table_;
};

Profile parse_profile(const nlohmann::json& document);
Profile parse_profile(std::string_view text);
Profile load_profile(const std::string& path);

/// Travel time b by adaptive Gauss-Legendre quadrature to absolute tolerance `tol`.
DerivedScales travel_time(const Profile& profile, double tol = 1e-12);

}  // namespace tte
