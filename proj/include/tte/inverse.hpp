#pragma once

// Spectral comparison and defect recovery from located zeros of d_0.
//
// Verdicts are about spectra ("identical" / "distinct"), never about profiles:
// the uniqueness argument is non-constructive.

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "tte/rootfinder.hpp"

namespace tte {

struct DefectEstimate {
  double defect = 0.0;        ///< mean of the two estimators
  double from_spacing = 0.0;  ///< pi / median spacing of consecutive real zeros
  double from_density = 0.0;  ///< pi * slope of the real-zero counting function
  int zeros_used = 0;
  /// Slope of the counting function over all near-axis zeros (real or not), for reference.
  double near_axis_density = 0.0;
};

/// Recovers |a - b| from the real zeros of the report (at least 8 required).
DefectEstimate recover_defect(const SpectrumReport& report);

struct MatchedPair {
  cplx first;
  cplx second;
  double distance = 0.0;
};

enum class Verdict { indistinguishable, distinct };

struct ComparisonVerdict {
  std::vector<MatchedPair> matched_pairs;
  double max_mismatch = 0.0;
  int unmatched_first = 0;
  int unmatched_second = 0;
  std::optional<double> recovered_defect_first;
  std::optional<double> recovered_defect_second;
  Verdict verdict = Verdict::distinct;
  bool same_n0 = false;
  bool same_sign_class = false;
  /// Both conditions hold; otherwise the comparison lies outside the theorem's hypotheses.
  bool preconditions_met = false;
};

/// Greedy nearest-neighbour matching in modulus order. A pair matches when its
/// distance is at most tol_scale * (1 + |k|).
ComparisonVerdict compare_spectra(const SpectrumReport& first, const SpectrumReport& second,
                                  double tol_scale = 1e-4);

nlohmann::json to_json(const ComparisonVerdict& verdict);

}  // namespace tte
