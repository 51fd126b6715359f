// ghostpol: simulate and analyze ghost / heralded polarimetry sweeps.

#include <CLI11.hpp>

#include <iostream>

#include "ghostpol/commands.hpp"

namespace cli = ghostpol::cli;

int main(int argc, char** argv) {
  CLI::App app{"Ghost polarimetry with polarization-entangled photon pairs.\n"
               "All angles on the command line and in files are in degrees."};
  app.require_subcommand(1);

  int workers = 1;
  auto add_workers = [&](CLI::App* sub) {
    sub->add_option("--workers", workers, "Worker threads for repetitions (output is independent of this)")
        ->check(CLI::Range(1, 256));
  };

  cli::SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate one sweep and write its CSV");
  simulate->add_option("scenario", sim.scenario, "Scenario file or preset:<name>")->required();
  simulate->add_option("--seed", sim.seed, "Override the scenario RNG seed");
  simulate->add_option("--dwell", sim.dwell, "Override the dwell time per angle (s)");
  simulate->add_option("--out", sim.out, "CSV output path (default: stdout)");

  cli::FitArgs fit;
  std::string fit_channel = "coincidence";
  auto* fit_cmd = app.add_subcommand("fit", "Fit a sinusoidal fringe to a sweep CSV");
  fit_cmd->add_option("csv", fit.csv, "Sweep CSV")->required();
  fit_cmd->add_option("--channel", fit_channel, "coincidence | singles_sample")
      ->check(CLI::IsMember({"coincidence", "singles_sample"}));
  fit_cmd->add_flag("--subtract-accidentals", fit.fit.subtract_accidentals,
                    "Subtract S*R*dt accidentals before fitting");
  fit_cmd->add_option("--gate-time", fit.fit.gate_time, "Coincidence window (s)");
  fit_cmd->add_option("--out", fit.out, "Machine-readable report (CSV)");

  cli::RotationArgs rot;
  std::string sense = "direct";
  auto* rotation = app.add_subcommand("rotation", "Optical rotation from blank and sample sweeps");
  rotation->add_option("--blank", rot.blank, "Blank sweep CSV(s)")->required();
  rotation->add_option("--sample", rot.sample, "Sample sweep CSV(s), paired with --blank")->required();
  rotation->add_option("--unwrap-hint", rot.unwrap_hint, "Report rotation within +/-90 of this (deg)");
  rotation->add_option("--sense", sense,
                       "direct: rotating polarizer after the cell; mirrored: ghost sweep rotating the reference arm")
      ->check(CLI::IsMember({"direct", "mirrored"}));
  rotation->add_flag("--subtract-accidentals", rot.fit.subtract_accidentals,
                     "Subtract S*R*dt accidentals before fitting");
  rotation->add_option("--gate-time", rot.fit.gate_time, "Coincidence window (s)");
  rotation->add_option("--out", rot.out, "Machine-readable report (CSV)");

  cli::ChshArgs chsh;
  auto* chsh_cmd = app.add_subcommand("chsh", "CHSH S from repeated 16-setting measurements");
  chsh_cmd->add_option("scenario", chsh.scenario, "Scenario file or preset:<name>")->required();
  chsh_cmd->add_option("--repeats", chsh.repeats, "Repetitions of the 16-setting sequence")
      ->check(CLI::PositiveNumber);
  chsh_cmd->add_option("--seed", chsh.seed, "Override the scenario RNG seed");
  chsh_cmd->add_option("--dwell", chsh.dwell, "Dwell per setting (s)");
  chsh_cmd->add_flag("--exact", chsh.exact, "Use expected counts instead of Poisson draws");
  chsh_cmd->add_option("--out", chsh.out, "Machine-readable report (CSV)");
  add_workers(chsh_cmd);

  cli::ScalingArgs scal;
  auto* scaling = app.add_subcommand("scaling", "Phase repeatability versus total coincidences");
  scaling->add_option("scenario", scal.scenario, "Scenario file or preset:<name>")->required();
  scaling->add_option("--n", scal.n_targets, "Target coincidences per sweep (>= 3 values over >= 2 decades)")
      ->delimiter(',')
      ->required();
  scaling->add_option("--repeats", scal.repeats, "Sweeps per target")->check(CLI::Range(2, 1000000));
  scaling->add_option("--seed", scal.seed, "Override the scenario RNG seed");
  scaling->add_flag("--subtract-accidentals", scal.subtract_accidentals,
                    "Subtract S*R*dt accidentals before fitting");
  scaling->add_option("--out", scal.out, "Table output (CSV)");
  add_workers(scaling);

  cli::ReproduceArgs repro;
  auto* reproduce = app.add_subcommand("reproduce-paper",
                                       "Run every preset and compare with the published values");
  reproduce->add_option("--out", repro.out, "Comparison table (CSV)");
  add_workers(reproduce);

  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "Print a preset as a scenario file (or 'list')");
  preset->add_option("name", preset_name, "Preset name, or list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "ghostpol: E_USAGE: " << e.what() << "\n";
    return cli::kUsage;
  }

  if (*simulate) return cli::cmd_simulate(sim, std::cout, std::cerr);
  if (*fit_cmd) {
    fit.fit.channel = fit_channel == "coincidence" ? ghostpol::FitChannel::coincidence
                                                   : ghostpol::FitChannel::singles_sample;
    return cli::cmd_fit(fit, std::cout, std::cerr);
  }
  if (*rotation) {
    rot.sense = sense == "direct" ? ghostpol::FringeSense::direct : ghostpol::FringeSense::mirrored;
    return cli::cmd_rotation(rot, std::cout, std::cerr);
  }
  if (*chsh_cmd) {
    chsh.workers = workers;
    return cli::cmd_chsh(chsh, std::cout, std::cerr);
  }
  if (*scaling) {
    scal.workers = workers;
    return cli::cmd_scaling(scal, std::cout, std::cerr);
  }
  if (*reproduce) {
    repro.workers = workers;
    return cli::cmd_reproduce_paper(repro, std::cout, std::cerr);
  }
  if (*preset) return cli::cmd_preset(preset_name, std::cout, std::cerr);
  return cli::kUsage;
}
