// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "ghostpol/estimation.hpp"
#include "ghostpol/experiment.hpp"

using namespace ghostpol;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

int workers() {
  if (const char* w = std::getenv("GHOSTPOL_WORKERS")) return std::max(1, std::atoi(w));
  return 2;
}

Outcome exact_chsh() {
  const Preset p = paper_preset("chsh_bare");
  ApparatusConfig a = p.apparatus;
  a.visibility = 1.0;
  ChshOptions opt;
  opt.exact = true;
  opt.include_accidentals = false;
  const auto r = chsh_S(p.geometry, a, std::nullopt, ChshSettings{}, 1, opt);
  const double err = std::abs(r.S - 2.0 * std::numbers::sqrt2);
  return {err <= 1e-9, fmt("S = %.15f, |S - 2 sqrt2| = %.2e (limit 1e-9)", r.S, err)};
}

Outcome chsh_reproduction() {
  const Preset p = paper_preset("chsh_bare");
  ChshOptions opt;
  opt.workers = workers();
  const auto r = chsh_S(p.geometry, p.apparatus, p.sample, ChshSettings{}, 100, opt);
  const double sigma = r.sigma_S.value_or(0.0);
  const bool pass = std::abs(r.S - 2.39) <= 0.07 && sigma >= 0.035 && sigma <= 0.14;
  return {pass, fmt("V = %.3f, dwell %.1f s, 100 repeats: S = %.4f, std = %.4f "
                    "(need |S - 2.39| <= 0.07, std in [0.035, 0.14])",
                    p.apparatus.visibility, p.apparatus.dwell_time, r.S, sigma)};
}

Outcome accidentals() {
  // 19000 * 36000 * 1.523e-9 = 1.041732 exactly; the quoted 1.0417 is that
  // value to four decimals. Both readings are reported.
  const double acc = accidental_rate(19000.0, 36000.0, 1.523e-9);
  const long double reference = 19000.0L * 36000.0L * 1.523e-9L;
  const double rel_formula = static_cast<double>(std::abs(acc - reference) / reference);
  const double rel_quoted = std::abs(acc - 1.0417) / 1.0417;
  const bool rounds = std::abs(std::round(acc * 1e4) / 1e4 - 1.0417) < 1e-12;
  return {rel_formula <= 1e-6 && rounds,
          fmt("acc = %.7f /s; rel. error vs S*R*dt %.1e (limit 1e-6); rounds to 1.0417: %s; "
              "rel. deviation from 1.0417 itself %.1e",
              acc, rel_formula, rounds ? "yes" : "no", rel_quoted)};
}

struct RotationRun {
  RotationMeasurement ghost[3], heralded[3];
  double truth[3] = {};
};

const RotationRun& rotation_runs() {
  static const RotationRun run = [] {
    RotationRun r;
    const char* cells[] = {"1cm", "2cm", "5cm"};
    RunOptions opt;
    opt.workers = workers();
    const auto grid = default_angle_grid();
    for (int i = 0; i < 3; ++i) {
      for (int g = 0; g < 2; ++g) {
        const std::string prefix = g == 0 ? "ghost" : "heralded";
        const Preset blank = paper_preset(prefix + "_blank");
        const Preset sample = paper_preset(prefix + "_limonene_" + cells[i]);
        r.truth[i] = sample.sample->rotation().deg();
        (g == 0 ? r.ghost : r.heralded)[i] = measure_rotation(
            blank.geometry, blank.apparatus, sample.apparatus, *sample.sample, grid, 40, opt);
      }
    }
    return r;
  }();
  return run;
}

Outcome ghost_rotation() {
  const auto& r = rotation_runs();
  bool pass = true;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    const auto& m = r.ghost[i];
    const double s = m.sigma.value_or(0.0);
    const bool ok = std::abs(m.delta_hat - r.truth[i]) <= 3.0 * s && s >= 0.62 / 5.0 && s <= 1.5 * 5.0;
    pass = pass && ok;
    detail += fmt("%s%.1f: %.3f +/- %.3f", i ? "; " : "", r.truth[i], m.delta_hat, s);
  }
  const Preset p = paper_preset("ghost_blank");
  const auto grid = default_angle_grid();
  double mean_rate = 0.0;
  for (const auto& t : grid) mean_rate += expected_rates(p.geometry, p.apparatus, p.sample, t).coincidence;
  mean_rate /= static_cast<double>(grid.size());
  detail += fmt(" (mean %.0f c/s, dwell %.1f s, 36 angles, 40 repeats; sigma must lie in [0.124, 7.5] deg; "
                "5 cm target is the configured 62.0 deg, not the measured 69.49 deg)",
                mean_rate, p.apparatus.dwell_time);
  return {pass, detail};
}

Outcome consistency() {
  const auto& r = rotation_runs();
  bool pass = true;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    const auto& g = r.ghost[i];
    const auto& h = r.heralded[i];
    const double diff = g.delta_hat - h.delta_hat;
    const double lim = 2.0 * std::hypot(g.sigma.value_or(0.0), h.sigma.value_or(0.0));
    pass = pass && std::abs(diff) <= lim;
    detail += fmt("%s%.1f: ghost %.3f, heralded %.3f, |diff| %.3f <= %.3f", i ? "; " : "", r.truth[i],
                  g.delta_hat, h.delta_hat, std::abs(diff), lim);
  }
  return {pass, detail};
}

Outcome scaling() {
  const Preset p = paper_preset("ghost_blank");
  const std::vector<double> targets = {1e3, 3.16e3, 1e4, 3.16e4, 1e5, 3.16e5, 1e6};
  RunOptions opt;
  opt.workers = workers();
  const auto s = scaling_study(p.geometry, p.apparatus, p.sample, default_angle_grid(), targets, 100, opt);
  const bool pass = std::abs(s.slope_log_n + 0.5) <= 0.05;
  return {pass, fmt("7 points 1e3..1e6, 100 repeats: slope vs n %.4f (need -0.50 +/- 0.05), "
                    "vs 1/sqrt(n) %.4f, mean k %.3f",
                    s.slope_log_n, s.slope_inv_sqrt_n, s.k_mean)};
}

Outcome phase_anchor() {
  const Preset p = paper_preset("ghost_blank");
  const auto grid = default_angle_grid();
  ApparatusConfig a = p.apparatus;
  a.dwell_time = dwell_for_total(p.geometry, a, p.sample, grid, 203000.0);
  RunOptions opt;
  opt.workers = workers();
  const auto phases = repeated_phases(p.geometry, a, p.sample, grid, 100, opt);
  const double sigma = orientation_stats(phases).stddev * std::numbers::pi / 180.0;
  const bool pass = sigma >= 0.002 / 1.5 && sigma <= 0.002 * 1.5;
  return {pass, fmt("dwell %.3f s per angle for n = 203000: sigma_phi = %.5f rad over 100 sweeps "
                    "(need [%.5f, %.5f])",
                    a.dwell_time, sigma, 0.002 / 1.5, 0.003)};
}

Outcome property_suites() {
  const std::string cmd = std::string("\"") + GHOSTPOL_UNIT_TESTS +
                          "\" --source-file=*test_polarization.cpp,*test_rng.cpp,*test_estimation.cpp,"
                          "*test_sweep_csv.cpp,*test_experiment.cpp --minimal";
  const int rc = std::system(cmd.c_str());
  return {rc == 0, fmt("density-matrix, fit, chsh_E oracle, Poisson, CSV suites: exit status %d", rc)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;
  };
  const Criterion criteria[] = {
      {"1 exact-oracle CHSH", exact_chsh, 1.0},
      {"2 CHSH S reproduction", chsh_reproduction, 60.0},
      {"3 accidental formula", accidentals, 1.0},
      {"4 ghost rotation", ghost_rotation, 0.0},
      {"5 ghost/heralded consistency", consistency, 0.0},
      {"6 shot-noise scaling", scaling, 600.0},
      {"7 phase reproducibility", phase_anchor, 0.0},
      {"8 property suites", property_suites, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt(" [over time budget %.0f s]", c.budget_s);
    }
    std::printf("%s  %-30s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
