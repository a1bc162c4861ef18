#include "tte/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tte/determinant.hpp"
#include "tte/entire_analysis.hpp"
#include "tte/error.hpp"
#include "tte/inverse.hpp"
#include "tte/parallel.hpp"
#include "tte/rootfinder.hpp"

namespace tte::cli {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

nlohmann::json metadata() { return {{"tool", "tte"}, {"version", kVersion}}; }

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read '{}'", path));
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
}

// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, std::ostream& fallback, const std::string& text) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw ValidationError(fmt::format("cannot write '{}'", path));
  file << text;
}

std::string dump(nlohmann::json doc) {
  doc["metadata"] = metadata();
  return doc.dump(2) + "\n";
}

WedgeRegion parse_wedge(const std::vector<double>& v) {
  if (v.size() != 4) throw ValidationError("--wedge expects r0,r1,alpha,beta");
  WedgeRegion w{v[0], v[1], v[2], v[3]};
  w.validate();
  return w;
}

struct Range {
  double lo = 0.0, hi = 0.0;
  int n = 1;
};

Range parse_range(const std::vector<double>& v, const char* flag) {
  if (v.size() != 3 || v[2] < 1 || v[2] != std::floor(v[2])) {
    throw ValidationError(fmt::format("{} expects lo,hi,count", flag));
  }
  return {v[0], v[1], static_cast<int>(v[2])};
}

double at(const Range& r, int i) {
  return r.n == 1 ? r.lo : r.lo + (r.hi - r.lo) * i / (r.n - 1);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interior transmission eigenvalues of spherically stratified media", "tte"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string profile_path, out_path, summary_path, spectrum_path, a_path, b_path;
  std::vector<double> wedge_v, re_v, im_v, k_v;
  double rtol = 1e-11, atol = 1e-13, r_lo = 50.0, r_hi = 300.0, radius = 150.0, tol = 1e-4;
  double k_lo = 100.0, k_hi = 200.0, k_step = 10.0;
  int theta_count = 37, l = 0;

  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--rtol", rtol, "integrator relative tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--atol", atol, "integrator absolute tolerance")->check(CLI::PositiveNumber);
  };
  auto add_profile = [&](CLI::App* sub) {
    sub->add_option("--profile", profile_path, "profile JSON document")->required();
  };

  auto* info = app.add_subcommand("profile-info", "travel time, defect and n(0) of a profile");
  add_profile(info);

  auto* eval = app.add_subcommand("eval", "evaluate d_l on points or a grid (CSV)");
  add_profile(eval);
  add_solver(eval);
  eval->add_option("--k", k_v, "single point re,im")->expected(2)->delimiter(',');
  eval->add_option("--re", re_v, "real-part grid lo,hi,count")->expected(3)->delimiter(',');
  eval->add_option("--im", im_v, "imaginary-part grid lo,hi,count")->expected(3)->delimiter(',');
  eval->add_option("--l", l, "angular index")->check(CLI::Range(0, kMaxAngularIndex));
  eval->add_option("--out", out_path);

  auto* eigs = app.add_subcommand("eigs", "locate zeros of d_0 in a wedge (JSON)");
  add_profile(eigs);
  add_solver(eigs);
  eigs->add_option("--wedge", wedge_v, "r0,r1,alpha,beta")
      ->expected(4)
      ->delimiter(',')
      ->required();
  eigs->add_option("--out", out_path);

  auto* indicator = app.add_subcommand("indicator", "indicator function of d_0 (CSV)");
  add_profile(indicator);
  add_solver(indicator);
  indicator->add_option("--theta-count", theta_count)->check(CLI::Range(2, 10000));
  indicator->add_option("--rlo", r_lo)->check(CLI::PositiveNumber);
  indicator->add_option("--rhi", r_hi)->check(CLI::PositiveNumber);
  indicator->add_option("--out", out_path);

  auto* type = app.add_subcommand("type", "exponential type of d_0 from its indicator");
  add_profile(type);
  add_solver(type);
  type->add_option("--theta-count", theta_count)->check(CLI::Range(37, 10000));
  type->add_option("--rlo", r_lo)->check(CLI::PositiveNumber);
  type->add_option("--rhi", r_hi)->check(CLI::PositiveNumber);
  type->add_option("--out", out_path);

  auto* density = app.add_subcommand("density", "angular zero density from a spectrum");
  density->add_option("--spectrum", spectrum_path, "SpectrumReport JSON")->required();
  density->add_option("--wedge", wedge_v, "r0,r1,alpha,beta (default: the report's)")
      ->expected(4)->delimiter(',');
  density->add_option("--out", out_path, "CSV r,count");
  density->add_option("--summary", summary_path, "JSON summary {delta, stderr}");

  auto* cartwright = app.add_subcommand("cartwright", "Cartwright consistency diagnostics");
  add_profile(cartwright);
  add_solver(cartwright);
  cartwright->add_option("--radius", radius)->check(CLI::PositiveNumber);
  cartwright->add_option("--spectrum", spectrum_path, "reuse a report covering [0, pi/2]");
  cartwright->add_option("--rlo", r_lo)->check(CLI::PositiveNumber);
  cartwright->add_option("--rhi", r_hi)->check(CLI::PositiveNumber);
  cartwright->add_option("--out", out_path);

  auto* compare = app.add_subcommand("compare", "compare two spectra");
  compare->add_option("--a", a_path)->required();
  compare->add_option("--b", b_path)->required();
  compare->add_option("--tol", tol, "pair tolerance scale: tol * (1 + |k|)")
      ->check(CLI::PositiveNumber);
  compare->add_option("--out", out_path);

  auto* asym = app.add_subcommand("check-asymptotics", "real-axis asymptotics of d_0 (CSV)");
  add_profile(asym);
  add_solver(asym);
  asym->add_option("--kmin", k_lo)->check(CLI::PositiveNumber);
  asym->add_option("--kmax", k_hi)->check(CLI::PositiveNumber);
  asym->add_option("--step", k_step)->check(CLI::PositiveNumber);
  asym->add_option("--out", out_path);
  asym->add_option("--summary", summary_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  SolverOptions solver;
  solver.rtol = rtol;
  solver.atol = atol;

  try {
    if (*info) {
      const Profile p = load_profile(profile_path);
      const DerivedScales s = travel_time(p);
      out << fmt::format("a={}\nb={}\ns={}\nn0={}\nsign_class={}\nstrict={}\nhash={}\n",
                         num(p.radius()), num(s.b), num(s.s), num(s.n0), to_string(s.sign_class),
                         p.strict(), p.hash());
      return 0;
    }

    if (*eval) {
      const Profile p = load_profile(profile_path);
      std::vector<cplx> ks;
      if (!k_v.empty()) ks.emplace_back(k_v[0], k_v[1]);
      if (!re_v.empty() || !im_v.empty()) {
        const Range re = re_v.empty() ? Range{} : parse_range(re_v, "--re");
        const Range im = im_v.empty() ? Range{} : parse_range(im_v, "--im");
        for (int i = 0; i < re.n; ++i) {
          for (int j = 0; j < im.n; ++j) ks.emplace_back(at(re, i), at(im, j));
        }
      }
      if (ks.empty()) throw ValidationError("eval: give --k or a --re/--im grid");
      std::vector<DeterminantValue> values(ks.size());
      parallel_for(ks.size(), [&](std::size_t i) {
        values[i] = l == 0 ? d0(p, ks[i], solver, false) : dl(p, ks[i], l, solver);
      });
      std::ostringstream csv;
      csv << "k_re,k_im,d_re,d_im,normalized_re,normalized_im\n";
      for (const auto& v : values) {
        const cplx nrm = v.normalized.value_or(cplx(std::nan(""), std::nan("")));
        csv << fmt::format("{},{},{},{},{},{}\n", num(v.k.real()), num(v.k.imag()),
                           num(v.value.real()), num(v.value.imag()), num(nrm.real()),
                           num(nrm.imag()));
      }
      emit(out_path, out, csv.str());
      return 0;
    }

    if (*eigs) {
      const Profile p = load_profile(profile_path);
      const SpectrumReport report = find_d0_zeros(p, parse_wedge(wedge_v), solver);
      emit(out_path, out, dump(to_json(report)));
      return 0;
    }

    if (*indicator || *type) {
      const Profile p = load_profile(profile_path);
      if (!p.strict()) throw ValidationError("indicator estimation requires a strict profile");
      if (r_hi > solver.k_max) throw ValidationError("--rhi exceeds k_max");
      const auto grid = default_theta_grid(theta_count);
      const IndicatorProfile ind =
          indicator_profile(make_d0_log_modulus(p, solver), grid, r_lo, r_hi);
      if (*indicator) {
        std::ostringstream csv;
        csv << "theta,h,residual\n";
        for (std::size_t i = 0; i < grid.size(); ++i) {
          csv << fmt::format("{},{},{}\n", num(ind.theta_grid[i]), num(ind.h_values[i]),
                             num(ind.fit_residuals[i]));
        }
        emit(out_path, out, csv.str());
      } else {
        const DerivedScales s = travel_time(p);
        emit(out_path, out,
             dump({{"type", type_estimate(ind)},
                   {"defect_from_quadrature", std::abs(s.s)},
                   {"a_plus_b", p.radius() + s.b},
                   {"theta_count", theta_count},
                   {"fit_window", {r_lo, r_hi}}}));
      }
      return 0;
    }

    if (*density) {
      const SpectrumReport report = spectrum_from_json(read_json(spectrum_path));
      const WedgeRegion wedge = wedge_v.empty() ? report.region : parse_wedge(wedge_v);
      const DensityEstimate d = density_estimate(report, wedge);
      std::ostringstream csv;
      csv << "r,count\n";
      constexpr int rows = 200;
      for (int i = 0; i <= rows; ++i) {
        const double r = wedge.r1 * i / rows;
        csv << fmt::format("{},{}\n", num(r), counting_function(report, r, wedge.alpha, wedge.beta));
      }
      const std::string summary = dump({{"delta", d.delta},
                                        {"stderr", d.slope_stderr},
                                        {"zeros_in_fit", d.zeros_in_fit},
                                        {"insufficient", d.insufficient}});
      if (out_path.empty()) {
        out << csv.str();
        emit(summary_path, err, summary);
      } else {
        emit(out_path, out, csv.str());
        emit(summary_path, out, summary);
      }
      return 0;
    }

    if (*cartwright) {
      const Profile p = load_profile(profile_path);
      const SpectrumReport report =
          spectrum_path.empty()
              ? find_d0_zeros(p, {WedgeRegion::kMinRadius, radius, -kNearAxisHalfWidth,
                                  std::numbers::pi - kOffAxisMargin},
                              solver)
              : spectrum_from_json(read_json(spectrum_path));
      const IndicatorProfile ind = indicator_profile(make_d0_log_modulus(p, solver),
                                                     default_theta_grid(), r_lo, r_hi);
      emit(out_path, out, dump(to_json(cartwright_check(report, ind))));
      return 0;
    }

    if (*compare) {
      const SpectrumReport first = spectrum_from_json(read_json(a_path));
      const SpectrumReport second = spectrum_from_json(read_json(b_path));
      emit(out_path, out, dump(to_json(compare_spectra(first, second, tol))));
      return 0;
    }

    if (*asym) {
      const Profile p = load_profile(profile_path);
      if (!p.strict()) throw ValidationError("check-asymptotics requires a strict profile");
      std::ostringstream csv;
      csv << "k,normalized_residual,y_rel_err,yp_rel_err\n";
      double sum = 0.0, worst = 0.0;
      int count = 0;
      for (double k = k_lo; k <= k_hi + 1e-9 * k_hi; k += k_step) {
        const double res = normalized_residual(p, k, solver);
        const SolutionTrace t = solve_radial(p, k, 0, solver, false);
        const AsymptoticBoundary ab = asymptotic_boundary(p, k);
        const double ey = std::abs(ab.y - t.y_a) / std::max(std::abs(t.y_a), 1e-300);
        const double eyp = std::abs(ab.yp - t.yp_a) / std::max(std::abs(t.yp_a), 1e-300);
        csv << fmt::format("{},{},{},{}\n", num(k), num(res), num(ey), num(eyp));
        sum += res;
        worst = std::max(worst, res);
        ++count;
      }
      emit(out_path, out, csv.str());
      const std::string summary =
          dump({{"mean_residual", count ? sum / count : 0.0}, {"max_residual", worst},
                {"points", count}});
      emit(summary_path, out_path.empty() ? err : out, summary);
      return 0;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace tte::cli
