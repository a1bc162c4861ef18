#include "tte/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "tte/entire_analysis.hpp"
#include "tte/error.hpp"

namespace tte {

namespace {

constexpr int kMinRealZeros = 8;
constexpr double kRegionTol = 1e-12;

std::vector<cplx> expanded_zeros(const SpectrumReport& report) {
  std::vector<cplx> out;
  for (const auto& z : report.zeros) {
    for (int m = 0; m < z.multiplicity; ++m) out.push_back(z.location);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  return out;
}

bool same_region(const WedgeRegion& a, const WedgeRegion& b) {
  return std::abs(a.r0 - b.r0) <= kRegionTol * b.r0 && std::abs(a.r1 - b.r1) <= kRegionTol * b.r1 &&
         std::abs(a.alpha - b.alpha) <= kRegionTol && std::abs(a.beta - b.beta) <= kRegionTol;
}

}  // namespace

DefectEstimate recover_defect(const SpectrumReport& report) {
  // Only the real axis carries the sin(k(a - b)) law; non-real near-axis zeros
  // follow a different density and are excluded.
  std::vector<double> real;
  for (const auto& z : report.zeros) {
    if (z.location.imag() == 0.0 && z.location.real() > 0.0) {
      for (int m = 0; m < z.multiplicity; ++m) real.push_back(z.location.real());
    }
  }
  if (static_cast<int>(real.size()) < kMinRealZeros) {
    throw ValidationError(fmt::format("defect recovery needs at least {} real zeros, found {}",
                                      kMinRealZeros, real.size()));
  }
  std::sort(real.begin(), real.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < real.size(); ++i) gaps.push_back(real[i] - real[i - 1]);
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  double median = gaps[gaps.size() / 2];
  if (gaps.size() % 2 == 0) {
    const double lower = *std::max_element(gaps.begin(), gaps.begin() + gaps.size() / 2);
    median = 0.5 * (median + lower);
  }

  // Counting function of the real zeros on [r1/3, r1].
  const double hi = report.region.r1;
  const double lo = hi / 3.0;
  constexpr int grid = 300;
  double mx = 0.0, my = 0.0;
  std::vector<double> xs(grid), ys(grid);
  for (int i = 0; i < grid; ++i) {
    xs[i] = lo + (hi - lo) * i / (grid - 1);
    ys[i] = static_cast<double>(std::upper_bound(real.begin(), real.end(), xs[i]) - real.begin());
    mx += xs[i];
    my += ys[i];
  }
  mx /= grid;
  my /= grid;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < grid; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }

  DefectEstimate out;
  out.from_spacing = std::numbers::pi / median;
  out.from_density = std::numbers::pi * sxy / sxx;
  out.defect = 0.5 * (out.from_spacing + out.from_density);
  out.zeros_used = static_cast<int>(real.size());
  try {
    const WedgeRegion near{report.region.r0, report.region.r1, -kNearAxisHalfWidth,
                           kNearAxisHalfWidth};
    out.near_axis_density = density_estimate(report, near).delta;
  } catch (const ValidationError&) {
    out.near_axis_density = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

ComparisonVerdict compare_spectra(const SpectrumReport& first, const SpectrumReport& second,
                                  double tol_scale) {
  if (!same_region(first.region, second.region)) {
    throw ValidationError("compare_spectra: the reports cover different wedges");
  }
  ComparisonVerdict out;
  if (first.profile && second.profile) {
    out.same_n0 = std::abs(first.profile->n0 - second.profile->n0) <=
                  1e-9 * std::max(1.0, std::abs(first.profile->n0));
    out.same_sign_class = first.profile->sign_class == second.profile->sign_class;
  }
  out.preconditions_met = out.same_n0 && out.same_sign_class;

  const auto zs1 = expanded_zeros(first);
  const auto zs2 = expanded_zeros(second);
  std::vector<bool> used(zs2.size(), false);
  bool all_within = true;
  for (cplx z : zs1) {
    std::size_t best = zs2.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < zs2.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(z - zs2[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == zs2.size()) {
      ++out.unmatched_first;
      continue;
    }
    used[best] = true;
    out.matched_pairs.push_back({z, zs2[best], best_d});
    out.max_mismatch = std::max(out.max_mismatch, best_d);
    if (best_d > tol_scale * (1.0 + std::abs(z))) all_within = false;
  }
  out.unmatched_second = static_cast<int>(std::count(used.begin(), used.end(), false));
  out.verdict = all_within && out.unmatched_first == 0 && out.unmatched_second == 0
                    ? Verdict::indistinguishable
                    : Verdict::distinct;

  auto defect = [](const SpectrumReport& r) -> std::optional<double> {
    try {
      return recover_defect(r).defect;
    } catch (const ValidationError&) {
      return std::nullopt;
    }
  };
  out.recovered_defect_first = defect(first);
  out.recovered_defect_second = defect(second);
  return out;
}

nlohmann::json to_json(const ComparisonVerdict& v) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : v.matched_pairs) {
    pairs.push_back({{"first", {p.first.real(), p.first.imag()}},
                     {"second", {p.second.real(), p.second.imag()}},
                     {"distance", p.distance}});
  }
  auto opt = [](const std::optional<double>& x) -> nlohmann::json {
    return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
  };
  return {{"verdict", v.verdict == Verdict::indistinguishable ? "indistinguishable" : "distinct"},
          {"max_mismatch", v.max_mismatch},
          {"unmatched", {{"first", v.unmatched_first}, {"second", v.unmatched_second}}},
          {"recovered_defect", {{"first", opt(v.recovered_defect_first)},
                                {"second", opt(v.recovered_defect_second)}}},
          {"preconditions",
           {{"same_n0", v.same_n0},
            {"same_sign_class", v.same_sign_class},
            {"met", v.preconditions_met}}},
          {"matched_pairs", pairs}};
}

}  // namespace tte
