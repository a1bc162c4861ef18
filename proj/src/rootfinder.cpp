#include "tte/rootfinder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include <fmt/format.h>

#include "tte/determinant.hpp"
#include "tte/error.hpp"
#include "tte/parallel.hpp"

namespace tte {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kPerturbationAttempts = 5;
constexpr int kRefineAttempts = 3;
constexpr double kAngleSlack = 1e-12;
// Offsets that keep the search box edges off the coordinate axes, where the
// real and imaginary zeros of d_0 live.
constexpr double kAxisPad = 0.0371;
constexpr double kOuterPad = 0.0173;

struct BoundaryZero {};

// Thread-safe memo of f over the points visited during one search. Sibling boxes
// share edges and their samples coincide bit for bit.
class Sampler {
 public:
  explicit Sampler(const AnalyticFunction& f) : f_(f) {}

  cplx operator()(cplx z) {
    const Key key{std::bit_cast<std::uint64_t>(z.real()), std::bit_cast<std::uint64_t>(z.imag())};
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const cplx v = f_.value(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericalError(fmt::format("non-finite function value at ({}, {})", z.real(), z.imag()));
    }
    std::lock_guard lock(mutex_);
    cache_.emplace(key, v);
    return v;
  }

 private:
  struct Key {
    std::uint64_t re, im;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return std::hash<std::uint64_t>{}(k.re * 0x9e3779b97f4a7c15ULL ^ k.im);
    }
  };

  const AnalyticFunction& f_;
  std::mutex mutex_;
  std::unordered_map<Key, cplx, KeyHash> cache_;
};

struct Winding {
  int count = 0;
  double max_abs = 0.0;
};

double wrap_phase(double d) {
  while (d > kPi) d -= kTwoPi;
  while (d <= -kPi) d += kTwoPi;
  return d;
}

struct PhaseWalk {
  Sampler& sampler;
  double max_step;
  double min_length;
  double max_abs = 0.0;
  double total = 0.0;

  void note(cplx f) {
    const double m = std::abs(f);
    if (m == 0.0) throw BoundaryZero{};
    max_abs = std::max(max_abs, m);
  }

  // A small principal increment can hide a full turn (a segment subtending
  // 2 pi / m near an m-fold zero), so every accepted step is confirmed at its
  // midpoint.
  double segment(cplx za, cplx fa, cplx zb, cplx fb) {
    const double d = wrap_phase(std::arg(fb) - std::arg(fa));
    const cplx zm = 0.5 * (za + zb);
    const cplx fm = sampler(zm);
    note(fm);
    if (std::abs(d) <= max_step) {
      const double d1 = wrap_phase(std::arg(fm) - std::arg(fa));
      const double d2 = wrap_phase(std::arg(fb) - std::arg(fm));
      if (std::abs(d1) <= max_step && std::abs(d2) <= max_step && std::abs(d1 + d2 - d) < kHalfPi) {
        return d1 + d2;
      }
    }
    if (std::abs(zb - za) < min_length) throw BoundaryZero{};
    return segment(za, fa, zm, fm) + segment(zm, fm, zb, fb);
  }

  // Edges are sampled from their lexicographically smaller endpoint so that the
  // two boxes sharing an edge request identical points.
  void edge(cplx a, cplx b, const CountOptions& opts) {
    const bool flip = std::pair(b.real(), b.imag()) < std::pair(a.real(), a.imag());
    const cplx p = flip ? b : a;
    const cplx q = flip ? a : b;
    const double len = std::abs(q - p);
    const int nseg = std::max(opts.min_segments_per_edge,
                              static_cast<int>(std::ceil(len / opts.max_initial_segment)));
    std::vector<cplx> zs(nseg + 1);
    for (int j = 0; j <= nseg; ++j) zs[j] = p + (q - p) * (static_cast<double>(j) / nseg);
    zs.back() = q;
    std::vector<cplx> fs(nseg + 1);
    for (int j = 0; j <= nseg; ++j) {
      fs[j] = sampler(zs[j]);
      note(fs[j]);
    }
    double phase = 0.0;
    for (int j = 0; j < nseg; ++j) phase += segment(zs[j], fs[j], zs[j + 1], fs[j + 1]);
    total += flip ? -phase : phase;
  }
};

Winding winding(Sampler& sampler, const Rect& r, const CountOptions& opts) {
  double max_step = opts.max_phase_step;
  for (int attempt = 0; attempt <= kRefineAttempts; ++attempt) {
    PhaseWalk walk{sampler, max_step, 1e-9 * std::max(1.0, r.diameter())};
    const cplx c00{r.x0, r.y0}, c10{r.x1, r.y0}, c11{r.x1, r.y1}, c01{r.x0, r.y1};
    walk.edge(c00, c10, opts);
    walk.edge(c10, c11, opts);
    walk.edge(c11, c01, opts);
    walk.edge(c01, c00, opts);
    const double turns = walk.total / kTwoPi;
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) <= opts.max_rounding_residue) {
      return {static_cast<int>(rounded), walk.max_abs};
    }
    max_step *= 0.5;
  }
  throw NumericalError(fmt::format("phase tracking did not converge on [{}, {}] x [{}, {}]", r.x0,
                                   r.x1, r.y0, r.y1));
}

Rect expanded(const Rect& r, double fraction) {
  const double d = fraction * std::max(r.width(), r.height());
  return {r.x0 - d, r.x1 + d, r.y0 - d, r.y1 + d};
}

Winding winding_with_perturbation(Sampler& sampler, Rect& r, const CountOptions& opts) {
  const Rect base = r;
  for (int attempt = 0; attempt <= kPerturbationAttempts; ++attempt) {
    try {
      return winding(sampler, r, opts);
    } catch (const BoundaryZero&) {
      if (attempt == kPerturbationAttempts) break;
      r = expanded(base, 1e-4 * std::ldexp(1.0, attempt));
    }
  }
  throw NumericalError(fmt::format("zero on the boundary of [{}, {}] x [{}, {}]", base.x0, base.x1,
                                   base.y0, base.y1));
}

// Maps an angle to its representative in [0, pi/2] under z -> -z, z -> conj z.
double fold_angle(double theta) {
  double phi = std::fmod(theta, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  if (phi <= kHalfPi) return phi;
  if (phi <= kPi) return kPi - phi;
  if (phi <= 1.5 * kPi) return phi - kPi;
  return kTwoPi - phi;
}

struct FoldedInterval {
  double lo = 0.0;
  double hi = kHalfPi;
};

FoldedInterval fold_interval(double alpha, double beta) {
  FoldedInterval out{std::min(fold_angle(alpha), fold_angle(beta)),
                     std::max(fold_angle(alpha), fold_angle(beta))};
  // The fold is piecewise linear with extremes at multiples of pi/2.
  const long first = static_cast<long>(std::ceil(alpha / kHalfPi - 1e-12));
  const long last = static_cast<long>(std::floor(beta / kHalfPi + 1e-12));
  for (long m = first; m <= last; ++m) {
    if (m % 2 == 0) {
      out.lo = 0.0;
    } else {
      out.hi = kHalfPi;
    }
  }
  return out;
}

bool angle_between(double theta, double alpha, double beta) {
  double t = std::fmod(theta - alpha, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t > kTwoPi - kAngleSlack) t -= kTwoPi;
  return alpha + t <= beta + kAngleSlack;
}

// Conservative test of box and first-quadrant annular sector overlap.
bool intersects(const Rect& box, double r0, double r1, const FoldedInterval& sector) {
  const double x0 = std::max(box.x0, 0.0);
  const double y0 = std::max(box.y0, 0.0);
  if (x0 > box.x1 || y0 > box.y1) return false;
  const double rmin = std::hypot(x0, y0);
  const double rmax = std::hypot(box.x1, box.y1);
  if (rmax < r0 || rmin > r1) return false;
  if (x0 == 0.0 && y0 == 0.0) return true;
  const double amin = std::atan2(y0, box.x1);
  const double amax = std::atan2(box.y1, x0);
  return amax >= sector.lo - kAngleSlack && amin <= sector.hi + kAngleSlack;
}

cplx snap(cplx z) {
  const double tol = 1e-9 * std::max(1.0, std::abs(z));
  double re = std::abs(z.real()) <= tol ? 0.0 : std::abs(z.real());
  double im = std::abs(z.imag()) <= tol ? 0.0 : std::abs(z.imag());
  return {re, im};
}

struct NewtonResult {
  cplx z;
  int iters = 0;
  bool converged = false;
};

NewtonResult newton(const AnalyticFunction& f, const Rect& box, const FinderOptions& opts) {
  const cplx start = box.center();
  const double escape = 2.0 * box.diameter();
  NewtonResult res{start};
  if (f.derivative) {
    cplx z = start;
    for (int it = 1; it <= opts.newton_max_iters; ++it) {
      const cplx fz = f.value(z);
      const cplx dz = f.derivative(z);
      if (std::abs(dz) == 0.0 || !std::isfinite(std::abs(fz / dz))) break;
      const cplx step = fz / dz;
      z -= step;
      res.iters = it;
      if (std::abs(z - start) > escape) break;
      if (std::abs(step) <= opts.newton_tol * std::max(1.0, std::abs(z))) {
        res.z = z;
        res.converged = true;
        return res;
      }
    }
  }
  // Secant fallback.
  cplx z0 = start;
  cplx z1 = start + cplx(1e-3, 7e-4) * box.diameter();
  cplx f0 = f.value(z0);
  for (int it = 1; it <= opts.newton_max_iters; ++it) {
    const cplx f1 = f.value(z1);
    const cplx denom = f1 - f0;
    if (std::abs(denom) == 0.0) break;
    const cplx step = f1 * (z1 - z0) / denom;
    z0 = z1;
    f0 = f1;
    z1 -= step;
    res.iters += 1;
    if (!std::isfinite(std::abs(z1)) || std::abs(z1 - start) > escape) break;
    if (std::abs(step) <= opts.newton_tol * std::max(1.0, std::abs(z1))) {
      res.z = z1;
      res.converged = true;
      return res;
    }
  }
  res.z = start;
  res.converged = false;
  return res;
}

struct Task {
  Rect box;
  int winding = 0;
  double max_abs = 0.0;
};

struct TaskOutcome {
  std::vector<Zero> zeros;
  std::vector<Task> children;
  int pruned = 0;
};

}  // namespace

double Rect::diameter() const { return std::hypot(width(), height()); }

AnalyticFunction make_d0_function(const Profile& profile, const SolverOptions& opts) {
  AnalyticFunction f;
  f.value = [profile, opts](cplx k) { return d0(profile, k, opts, false).value; };
  f.derivative = [profile, opts](cplx k) { return *d0(profile, k, opts, true).derivative; };
  f.scale = [profile, opts](cplx k) { return d0(profile, k, opts, false).term_scale; };
  return f;
}

int count_zeros(const AnalyticFunction& f, Rect rect, const CountOptions& opts) {
  if (!(rect.x1 > rect.x0 && rect.y1 > rect.y0)) {
    throw ValidationError("count_zeros: degenerate rectangle");
  }
  Sampler sampler(f);
  return winding_with_perturbation(sampler, rect, opts).count;
}

void WedgeRegion::validate() const {
  if (!(r0 >= kMinRadius)) {
    throw ValidationError(fmt::format("wedge inner radius {} below k_min = {}", r0, kMinRadius));
  }
  if (!(r1 > r0)) throw ValidationError("wedge requires r1 > r0");
  if (!(beta > alpha)) throw ValidationError("wedge requires beta > alpha");
  if (beta - alpha > kTwoPi + kAngleSlack) throw ValidationError("wedge wider than 2 pi");
}

bool WedgeRegion::contains_angle(double theta) const {
  for (double t : {theta, -theta, kPi - theta, kPi + theta}) {
    if (angle_between(t, alpha, beta)) return true;
  }
  return false;
}

std::vector<cplx> reflections(cplx z) {
  std::vector<cplx> out;
  for (cplx w : {z, -z, std::conj(z), -std::conj(z)}) {
    // Normalize signed zeros so that equal points compare and print equal.
    w = {w.real() == 0.0 ? 0.0 : w.real(), w.imag() == 0.0 ? 0.0 : w.imag()};
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
  }
  return out;
}

SpectrumReport find_zeros(const AnalyticFunction& f, const WedgeRegion& region,
                          const FinderOptions& opts) {
  region.validate();
  const FoldedInterval sector = fold_interval(region.alpha, region.beta);

  // Degeneracy scan on a 10 x 10 polar grid.
  {
    std::vector<double> ratios;
    for (int i = 0; i < 10; ++i) {
      const double r = region.r0 + (region.r1 - region.r0) * (i + 0.5) / 10.0;
      for (int j = 0; j < 10; ++j) {
        const double th = sector.lo + (sector.hi - sector.lo) * (j + 0.5) / 10.0;
        const cplx z = std::polar(r, th);
        const double v = std::abs(f.value(z));
        const double scale = f.scale ? f.scale(z) : 1.0 + v;
        ratios.push_back(scale > 0.0 ? v / scale : 0.0);
      }
    }
    std::nth_element(ratios.begin(), ratios.begin() + 50, ratios.end());
    if (ratios[50] < opts.degeneracy_threshold) {
      throw ValidationError("identically-zero function");
    }
  }

  Rect root{region.r0 * std::cos(sector.hi) - kOuterPad, region.r1 * std::cos(sector.lo) + kOuterPad,
            region.r0 * std::sin(sector.lo) - kOuterPad, region.r1 * std::sin(sector.hi) + kOuterPad};
  if (sector.lo <= kAngleSlack) root.y0 = -kAxisPad;
  if (sector.hi >= kHalfPi - kAngleSlack) root.x0 = -kAxisPad;

  Sampler sampler(f);
  const Winding root_w = winding_with_perturbation(sampler, root, opts.count);

  auto handle = [&](const Task& task) {
    TaskOutcome out;
    if (task.winding == 0) return out;
    if (!intersects(task.box, region.r0, region.r1, sector)) {
      out.pruned = task.winding;
      return out;
    }
    if (task.winding == 1) {
      const NewtonResult nr = newton(f, task.box, opts);
      if (nr.converged && task.box.contains(nr.z)) {
        out.zeros.push_back({nr.z, 1, std::abs(f.value(nr.z)), nr.iters, task.box, true});
        return out;
      }
    }
    if (task.box.diameter() < opts.min_box_diameter) {
      const cplx c = task.box.center();
      out.zeros.push_back({c, task.winding, std::abs(f.value(c)), 0, task.box, false});
      return out;
    }
    CountOptions count = opts.count;
    for (int refine = 0; refine <= kRefineAttempts; ++refine) {
      for (int attempt = 0; attempt <= kPerturbationAttempts; ++attempt) {
        const double shift = attempt == 0 ? 0.0 : 1e-4 * std::ldexp(1.0, attempt - 1);
        const Rect& b = task.box;
        const double xm = b.x0 + (0.5 + shift) * b.width();
        const double ym = b.y0 + (0.5 + shift) * b.height();
        const Rect quads[4] = {{b.x0, xm, b.y0, ym}, {xm, b.x1, b.y0, ym},
                               {b.x0, xm, ym, b.y1}, {xm, b.x1, ym, b.y1}};
        try {
          std::vector<Task> children;
          int sum = 0;
          for (const Rect& q : quads) {
            const Winding w = winding(sampler, q, count);
            children.push_back({q, w.count, w.max_abs});
            sum += w.count;
          }
          if (sum == task.winding) {
            out.children = std::move(children);
            return out;
          }
          break;  // conservation failed: refine the sampling
        } catch (const BoundaryZero&) {
          continue;
        }
      }
      count.max_phase_step *= 0.5;
      count.max_initial_segment *= 0.5;
    }
    throw NumericalError(fmt::format("count mismatch while subdividing [{}, {}] x [{}, {}]",
                                     task.box.x0, task.box.x1, task.box.y0, task.box.y1));
  };

  std::vector<Zero> found;
  int pruned = 0;
  std::vector<Task> level{{root, root_w.count, root_w.max_abs}};
  while (!level.empty()) {
    std::vector<TaskOutcome> outcomes(level.size());
    parallel_for(level.size(), [&](std::size_t i) { outcomes[i] = handle(level[i]); });
    std::vector<Task> next;
    for (auto& o : outcomes) {
      pruned += o.pruned;
      for (auto& z : o.zeros) found.push_back(std::move(z));
      for (auto& c : o.children) next.push_back(c);
    }
    level = std::move(next);
  }
  int located = 0;
  for (const auto& z : found) located += z.multiplicity;
  if (located + pruned != root_w.count) {
    throw NumericalError(fmt::format("count mismatch: {} located + {} pruned != {} enclosed",
                                     located, pruned, root_w.count));
  }

  // Canonical first-quadrant representatives inside the region, without duplicates
  // (a box straddling an axis finds both members of a reflected pair).
  std::vector<Zero> kept;
  for (auto z : found) {
    z.location = snap(z.location);
    const double m = std::abs(z.location);
    if (m < region.r0 || m > region.r1) continue;
    if (!region.contains_angle(std::arg(z.location))) continue;
    kept.push_back(z);
  }
  std::sort(kept.begin(), kept.end(), [](const Zero& a, const Zero& b) {
    const double ma = std::abs(a.location), mb = std::abs(b.location);
    if (ma != mb) return ma < mb;
    return a.location.imag() < b.location.imag();
  });
  std::vector<Zero> unique;
  for (const auto& z : kept) {
    bool dup = false;
    for (auto it = unique.rbegin(); it != unique.rend(); ++it) {
      if (std::abs(it->location) < std::abs(z.location) - opts.isolation_tol) break;
      if (std::abs(it->location - z.location) < opts.isolation_tol) {
        if (z.residual < it->residual) *it = z;
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(z);
  }

  SpectrumReport report;
  report.region = region;
  report.zeros = std::move(unique);
  report.settings = {{"newton_tol", opts.newton_tol},
                     {"newton_max_iters", opts.newton_max_iters},
                     {"min_box_diameter", opts.min_box_diameter},
                     {"isolation_tol", opts.isolation_tol},
                     {"max_phase_step", opts.count.max_phase_step}};
  return report;
}

SpectrumReport find_d0_zeros(const Profile& profile, const WedgeRegion& region,
                             const SolverOptions& solver, const FinderOptions& opts) {
  if (!profile.strict()) {
    throw ValidationError("spectral analysis requires a strict profile (n(a) = 1)");
  }
  if (region.r1 > solver.k_max) {
    throw ValidationError(fmt::format("wedge radius {} exceeds k_max = {}", region.r1, solver.k_max));
  }
  SpectrumReport report = find_zeros(make_d0_function(profile, solver), region, opts);
  const DerivedScales scales = travel_time(profile);
  report.profile_hash = profile.hash();
  report.profile = ProfileSummary{profile.radius(), scales.b, scales.n0, scales.sign_class};
  report.settings["solver_rtol"] = solver.rtol;
  report.settings["solver_atol"] = solver.atol;
  return report;
}

int counting_function(const SpectrumReport& report, double r, double alpha, double beta) {
  if (r > report.region.r1 * (1.0 + 1e-12)) {
    throw ValidationError(
        fmt::format("r = {} exceeds the searched radius {}", r, report.region.r1));
  }
  const FoldedInterval searched = fold_interval(report.region.alpha, report.region.beta);
  const FoldedInterval query = fold_interval(alpha, beta);
  if (query.lo < searched.lo - 1e-9 || query.hi > searched.hi + 1e-9) {
    throw ValidationError("query wedge lies outside the searched region");
  }
  int count = 0;
  for (const auto& z : report.zeros) {
    for (cplx w : reflections(z.location)) {
      if (std::abs(w) <= r && angle_between(std::arg(w), alpha, beta)) count += z.multiplicity;
    }
  }
  return count;
}

nlohmann::json to_json(const SpectrumReport& report) {
  nlohmann::json zeros = nlohmann::json::array();
  for (const auto& z : report.zeros) {
    zeros.push_back({{"re", z.location.real()},
                     {"im", z.location.imag()},
                     {"multiplicity", z.multiplicity},
                     {"residual", z.residual},
                     {"newton_iters", z.newton_iters},
                     {"refined", z.refined},
                     {"box", {z.box.x0, z.box.x1, z.box.y0, z.box.y1}}});
  }
  nlohmann::json doc = {
      {"profile_hash", report.profile_hash},
      {"region",
       {{"r0", report.region.r0},
        {"r1", report.region.r1},
        {"alpha", report.region.alpha},
        {"beta", report.region.beta}}},
      {"k_min_excluded", report.k_min_excluded},
      {"symmetry", "first-quadrant representatives; -z, conj(z), -conj(z) are also zeros"},
      {"settings", report.settings},
      {"zeros", zeros}};
  if (report.profile) {
    doc["profile"] = {{"a", report.profile->a},
                      {"b", report.profile->b},
                      {"n0", report.profile->n0},
                      {"sign_class", to_string(report.profile->sign_class)}};
  }
  return doc;
}

SpectrumReport spectrum_from_json(const nlohmann::json& doc) {
  try {
    SpectrumReport report;
    report.profile_hash = doc.value("profile_hash", std::string{});
    const auto& region = doc.at("region");
    report.region = {region.at("r0").get<double>(), region.at("r1").get<double>(),
                     region.at("alpha").get<double>(), region.at("beta").get<double>()};
    report.k_min_excluded = doc.value("k_min_excluded", WedgeRegion::kMinRadius);
    report.settings = doc.value("settings", nlohmann::json::object());
    for (const auto& z : doc.at("zeros")) {
      Zero zero;
      zero.location = {z.at("re").get<double>(), z.at("im").get<double>()};
      zero.multiplicity = z.at("multiplicity").get<int>();
      zero.residual = z.at("residual").get<double>();
      zero.newton_iters = z.value("newton_iters", 0);
      zero.refined = z.value("refined", true);
      if (z.contains("box")) {
        const auto& b = z.at("box");
        zero.box = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                    b.at(3).get<double>()};
      }
      report.zeros.push_back(zero);
    }
    if (doc.contains("profile")) {
      const auto& p = doc.at("profile");
      report.profile = ProfileSummary{p.at("a").get<double>(), p.at("b").get<double>(),
                                      p.at("n0").get<double>(),
                                      sign_class_from_string(p.at("sign_class").get<std::string>())};
    }
    report.region.validate();
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("spectrum report: {}", e.what()));
  }
}

}  // namespace tte
