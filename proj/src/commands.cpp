#include "ghostpol/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "ghostpol/errors.hpp"
#include "ghostpol/scenario.hpp"
#include "ghostpol/sweep_csv.hpp"

namespace ghostpol::cli {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// Key/value report: aligned plain text on `out`, CSV to `path` when given.
class Report {
 public:
  explicit Report(std::string title) : title_(std::move(title)) {}

  void add(std::string key, std::string value) { rows_.emplace_back(std::move(key), std::move(value)); }

  void emit(std::ostream& out, const std::string& path) const {
    out << "# " << title_ << "\n";
    std::size_t width = 0;
    for (const auto& [k, v] : rows_) width = std::max(width, k.size());
    for (const auto& [k, v] : rows_) out << std::left << std::setw(static_cast<int>(width + 2)) << k << v << "\n";
    if (!path.empty()) {
      std::string csv = "quantity,value\n";
      for (const auto& [k, v] : rows_) csv += k + "," + v + "\n";
      save_text_file(path, csv);
    }
  }

 private:
  std::string title_;
  std::vector<std::pair<std::string, std::string>> rows_;
};

std::string header(const std::string& command) {
  return "ghostpol " + command + " (preset_version " + std::string(kPresetVersion) + ")";
}

const char* mode_name(GeometryMode m) { return m == GeometryMode::ghost ? "ghost" : "heralded"; }

}  // namespace

int run_guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "ghostpol: " << e.code() << ": " << e.what() << "\n";
    return kIoFailure;
  } catch (const ParseError& e) {
    err << "ghostpol: " << e.code() << ": " << e.what() << "\n";
    return kInputError;
  } catch (const LookupError& e) {
    err << "ghostpol: " << e.code() << ": " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "ghostpol: " << e.code() << ": " << e.what() << "\n";
    return kEstimationError;
  } catch (const std::exception& e) {
    err << "ghostpol: E_INTERNAL: " << e.what() << "\n";
    return kEstimationError;
  }
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    Scenario s = load_scenario(args.scenario);
    if (args.seed) s.apparatus.rng_seed = *args.seed;
    if (args.dwell) s.apparatus.dwell_time = *args.dwell;
    const auto sweep = simulate_sweep(s.geometry, s.apparatus, s.sample, s.angles);
    const std::string csv = write_sweep_csv(sweep.records);
    if (args.out.empty()) {
      out << csv;
      return kOk;
    }
    save_text_file(args.out, csv);
    std::uint64_t total = 0;
    for (const auto& r : sweep.records) total += r.coincidences;
    Report rep(header("simulate"));
    rep.add("scenario", args.scenario);
    rep.add("seed", std::to_string(s.apparatus.rng_seed));
    rep.add("mode", mode_name(s.geometry.mode));
    rep.add("records", std::to_string(sweep.records.size()));
    rep.add("dwell_s", format_double(s.apparatus.dwell_time));
    rep.add("coincidences_total", std::to_string(total));
    rep.add("output", args.out);
    rep.emit(out, "");
    return kOk;
  });
}

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const auto records = load_sweep_csv(args.csv);
    const FringeFit fit = fit_fringe(records, args.fit);
    Report rep(header("fit"));
    rep.add("input", args.csv);
    rep.add("records", std::to_string(records.size()));
    rep.add("channel", args.fit.channel == FitChannel::coincidence ? "coincidence" : "singles_sample");
    rep.add("subtract_accidentals", args.fit.subtract_accidentals ? "true" : "false");
    rep.add("offset", fixed(fit.offset, 4));
    rep.add("amplitude", fixed(fit.amplitude, 4));
    rep.add("amplitude_stderr", fixed(fit.amplitude_stderr, 4));
    rep.add("phase_deg", fixed(fit.phase.deg(), 3));
    rep.add("phase_stderr_deg", fixed(fit.phase_stderr * 180.0 / std::numbers::pi, 4));
    rep.add("residual_rms", fixed(fit.residual_rms, 4));
    rep.add("n_total", fixed(fit.n_total, 0));
    rep.emit(out, args.out);
    return kOk;
  });
}

int cmd_rotation(const RotationArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    if (args.blank.empty() || args.blank.size() != args.sample.size())
      throw DomainError("need the same non-zero number of blank and sample sweeps");
    std::vector<double> deltas;
    double sigma_fit = 0.0;
    for (std::size_t i = 0; i < args.blank.size(); ++i) {
      const auto b = fit_fringe(load_sweep_csv(args.blank[i]), args.fit);
      const auto s = fit_fringe(load_sweep_csv(args.sample[i]), args.fit);
      deltas.push_back(extract_rotation(b, s, args.unwrap_hint, args.sense).delta_hat);
      sigma_fit = std::hypot(b.phase_stderr, s.phase_stderr) * 180.0 / std::numbers::pi;
    }
    const auto stats = orientation_stats(deltas, args.unwrap_hint);
    Report rep(header("rotation"));
    rep.add("pairs", std::to_string(deltas.size()));
    rep.add("sense", args.sense == FringeSense::direct ? "direct" : "mirrored");
    rep.add("delta_deg", fixed(stats.mean, 3));
    if (deltas.size() >= 2) {
      rep.add("sigma_deg", fixed(stats.stddev, 3));
      rep.add("sigma_kind", "repeatability");
    } else {
      rep.add("sigma_deg", fixed(sigma_fit, 3));
      rep.add("sigma_kind", "fit_covariance");
    }
    rep.emit(out, args.out);
    return kOk;
  });
}

int cmd_chsh(const ChshArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    Scenario s = load_scenario(args.scenario);
    if (args.seed) s.apparatus.rng_seed = *args.seed;
    if (args.dwell) s.apparatus.dwell_time = *args.dwell;
    const int repeats = args.repeats.value_or(s.analysis.repeats);
    ChshOptions opt;
    opt.exact = args.exact;
    opt.workers = args.workers;
    const ChshResult r = chsh_S(s.geometry, s.apparatus, s.sample, ChshSettings{}, repeats, opt);
    Report rep(header("chsh"));
    rep.add("scenario", args.scenario);
    rep.add("seed", std::to_string(s.apparatus.rng_seed));
    rep.add("repeats", std::to_string(repeats));
    rep.add("dwell_s", format_double(s.apparatus.dwell_time));
    rep.add("mode", args.exact ? "exact_rates" : "poisson");
    rep.add("E(22.5,0)", fixed(r.E_values[0], 5));
    rep.add("E(22.5,45)", fixed(r.E_values[1], 5));
    rep.add("E(67.5,0)", fixed(r.E_values[2], 5));
    rep.add("E(67.5,45)", fixed(r.E_values[3], 5));
    rep.add("S", fixed(r.S, 5));
    if (r.sigma_S) rep.add("sigma_S", fixed(*r.sigma_S, 5));
    if (r.S <= 2.0 * std::numbers::sqrt2) rep.add("visibility_inferred", fixed(infer_visibility(r.S), 5));
    rep.add("violates_bound", r.S > 2.0 ? "true" : "false");
    rep.emit(out, args.out);
    return kOk;
  });
}

int cmd_scaling(const ScalingArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    Scenario s = load_scenario(args.scenario);
    if (args.seed) s.apparatus.rng_seed = *args.seed;
    RunOptions opt;
    opt.workers = args.workers;
    opt.fit.channel = s.analysis.channel;
    opt.fit.subtract_accidentals = args.subtract_accidentals || s.analysis.subtract_accidentals;
    opt.fit.gate_time = s.apparatus.gate_time;
    const int repeats = args.repeats.value_or(s.analysis.repeats);
    const auto study =
        scaling_study(s.geometry, s.apparatus, s.sample, s.angles, args.n_targets, repeats, opt);

    out << "# " << header("scaling") << "\n";
    out << "# scenario " << args.scenario << "  seed " << s.apparatus.rng_seed << "  repeats "
        << repeats << "\n";
    std::string csv = "n_target,n_mean,dwell_s,sigma_phi_rad,inv_sqrt_n,k\n";
    for (const auto& row : study.rows) {
      csv += format_double(row.n_target) + "," + fixed(row.n_mean, 1) + "," +
             format_double(row.dwell) + "," + format_double(row.sigma_phi) + "," +
             format_double(1.0 / std::sqrt(row.n_mean)) + "," + fixed(row.k, 4) + "\n";
    }
    out << csv;
    out << "# slope log(sigma) vs log(n)       " << fixed(study.slope_log_n, 4) << "\n";
    out << "# slope log(sigma) vs log(1/sqrt n) " << fixed(study.slope_inv_sqrt_n, 4) << "\n";
    out << "# mean k = sigma*sqrt(n)            " << fixed(study.k_mean, 4) << "\n";
    if (!args.out.empty()) save_text_file(args.out, csv);
    return kOk;
  });
}

int cmd_preset(const std::string& name, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    if (name.empty() || name == "list") {
      for (const auto& n : preset_names()) out << n << "\n";
      return kOk;
    }
    out << "# preset " << name << " (preset_version " << kPresetVersion << ")\n"
        << format_scenario(scenario_from_preset(paper_preset(name)));
    return kOk;
  });
}

std::vector<PaperCheck> reproduce_paper_checks(int workers) {
  std::vector<PaperCheck> checks;
  const auto grid = default_angle_grid();

  {
    const double acc = accidental_rate(19000.0, 36000.0, 1.523e-9);
    checks.push_back({"accidental rate S*R*dt (1/s)", "~1 (1.0417)", fixed(acc, 5),
                      "|acc - 1.0417| < 5e-5", std::abs(acc - 1.0417) < 5e-5});
  }

  for (const char* name : {"chsh_bare", "chsh_1cm"}) {
    const Preset p = paper_preset(name);
    ChshOptions opt;
    opt.workers = workers;
    const auto r = chsh_S(p.geometry, p.apparatus, p.sample, ChshSettings{}, 100, opt);
    const bool bare = std::string(name) == "chsh_bare";
    const double sigma = r.sigma_S.value_or(0.0);
    PaperCheck c;
    c.name = std::string("CHSH S, ") + name + " (100 x 16 x " + format_double(p.apparatus.dwell_time) + " s)";
    c.simulated = fixed(r.S, 3) + " +/- " + fixed(sigma, 3);
    if (bare) {
      c.paper = "2.39 +/- 0.07";
      c.criterion = "|S - 2.39| <= 0.07, sigma in [0.035, 0.14]";
      c.pass = std::abs(r.S - 2.39) <= 0.07 && sigma >= 0.035 && sigma <= 0.14;
    } else {
      c.paper = "2.46 +/- 0.02 (full-curve method)";
      c.criterion = "S > 2 with settings compensated for the cell";
      c.pass = r.S > 2.0;
    }
    checks.push_back(c);
  }

  struct Paper {
    double ghost, ghost_sigma, heralded, heralded_sigma;
  };
  const std::pair<const char*, Paper> cells[] = {
      {"1cm", {12.72, 0.62, 12.14, 0.56}},
      {"2cm", {25.1, 0.77, 24.54, 0.37}},
      {"5cm", {69.49, 1.5, 67.85, 0.41}},
  };
  constexpr int kRotationRepeats = 40;
  for (const auto& [cell, paper] : cells) {
    RotationMeasurement m[2];
    for (int g = 0; g < 2; ++g) {
      const std::string prefix = g == 0 ? "ghost" : "heralded";
      const Preset blank = paper_preset(prefix + "_blank");
      const Preset sample = paper_preset(prefix + "_limonene_" + cell);
      const double truth = sample.sample->rotation().deg();
      RunOptions opt;
      opt.workers = workers;
      m[g] = measure_rotation(blank.geometry, blank.apparatus, sample.apparatus, *sample.sample,
                              grid, kRotationRepeats, opt);
      const double sigma = m[g].sigma.value_or(0.0);
      PaperCheck c;
      c.name = prefix + " rotation " + cell + " (deg)";
      c.paper = fixed(g == 0 ? paper.ghost : paper.heralded, 2) + " +/- " +
                fixed(g == 0 ? paper.ghost_sigma : paper.heralded_sigma, 2);
      c.simulated = fixed(m[g].delta_hat, 2) + " +/- " + fixed(sigma, 2) + " (configured " +
                    fixed(truth, 1) + ")";
      c.criterion = "|delta - configured| <= 3 sigma, sigma in [0.124, 7.5]";
      c.pass = std::abs(m[g].delta_hat - truth) <= 3.0 * sigma && sigma >= 0.62 / 5.0 &&
               sigma <= 1.5 * 5.0;
      checks.push_back(c);
    }
    const double s0 = m[0].sigma.value_or(0.0), s1 = m[1].sigma.value_or(0.0);
    const double diff = m[0].delta_hat - m[1].delta_hat;
    checks.push_back({std::string("ghost vs heralded ") + cell, "statistically consistent",
                      "diff " + fixed(diff, 2) + " (2 sigma " + fixed(2.0 * std::hypot(s0, s1), 2) + ")",
                      "|diff| <= 2 sqrt(s_g^2 + s_h^2)", std::abs(diff) <= 2.0 * std::hypot(s0, s1)});
  }

  {
    const Preset p = paper_preset("ghost_blank");
    ApparatusConfig a = p.apparatus;
    a.dwell_time = dwell_for_total(p.geometry, a, p.sample, grid, 203000.0);
    RunOptions opt;
    opt.workers = workers;
    const auto phases = repeated_phases(p.geometry, a, p.sample, grid, 40, opt);
    const double sigma = orientation_stats(phases).stddev * std::numbers::pi / 180.0;
    checks.push_back({"phase reproducibility at n = 203000 (rad)", "~0.002", fixed(sigma, 5),
                      "sigma in [0.002/1.5, 0.002*1.5]",
                      sigma >= 0.002 / 1.5 && sigma <= 0.002 * 1.5});
  }

  {
    const Preset p = paper_preset("ghost_blank");
    const std::vector<double> targets = {1e3, 3.16e3, 1e4, 3.16e4, 1e5, 3.16e5, 1e6};
    RunOptions opt;
    opt.workers = workers;
    const auto study = scaling_study(p.geometry, p.apparatus, p.sample, grid, targets, 100, opt);
    checks.push_back({"shot-noise slope vs 1/sqrt(n)", "~1", fixed(study.slope_inv_sqrt_n, 3) +
                                                                " (k = " + fixed(study.k_mean, 3) + ")",
                      "|slope - 1| <= 0.1", std::abs(study.slope_inv_sqrt_n - 1.0) <= 0.1});
  }
  return checks;
}

int cmd_reproduce_paper(const ReproduceArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const auto checks = reproduce_paper_checks(args.workers);
    out << "# " << header("reproduce-paper") << "; seeds fixed by presets\n";
    out << "# 5 cm target is the configured linear rotation (62.0 deg); the published 69.49 deg\n"
           "# includes a cell-path systematic that is not simulated.\n";
    std::size_t w = 0;
    for (const auto& c : checks) w = std::max(w, c.name.size());
    bool all = true;
    std::string csv = "check,paper,simulated,criterion,pass\n";
    for (const auto& c : checks) {
      out << std::left << std::setw(static_cast<int>(w + 2)) << c.name << std::setw(36) << c.paper
          << std::setw(44) << c.simulated << (c.pass ? "PASS" : "FAIL") << "\n";
      csv += "\"" + c.name + "\",\"" + c.paper + "\",\"" + c.simulated + "\",\"" + c.criterion +
             "\"," + (c.pass ? "true" : "false") + "\n";
      all = all && c.pass;
    }
    if (!args.out.empty()) save_text_file(args.out, csv);
    if (!all) {
      err << "ghostpol: E_CHECK_FAILED: one or more reproduction checks failed\n";
      return kCheckFailed;
    }
    return kOk;
  });
}

}  // namespace ghostpol::cli
