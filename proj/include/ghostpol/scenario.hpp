#pragma once

// Plain-text scenario files.
//
//   # comment
//   [geometry]
//   mode = ghost                  # ghost | heralded
//   rotating_arm = reference      # sample | reference
//   fixed_angle_deg = 0
//   angles_deg = 0:10:350         # start:step:stop (inclusive) or a comma list
//   [apparatus]
//   pair_rate = 55583.3           # pairs/s
//   eta_sample = 0.1
//   eta_reference = 0.1
//   bg_sample = 16220.835         # counts/s
//   bg_reference = 33220.835
//   gate_time_s = 1.523e-9
//   dwell_time_s = 12.2
//   visibility = 0.845
//   rng_seed = 1100
//   [sample]                      # optional; presence means a cell is inserted
//   specific_rotation_deg_per_cm = 12.4
//   length_cm = 2
//   transmission = 0.85
//   [analysis]
//   channel = coincidence         # coincidence | singles_sample
//   repeats = 40
//   subtract_accidentals = false
//   unwrap_hint_deg = 25          # optional
//
// Keys not listed take the values of the ghost_blank preset.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ghostpol/estimation.hpp"
#include "ghostpol/experiment.hpp"

namespace ghostpol {

struct AnalysisOptions {
  FitChannel channel = FitChannel::coincidence;
  int repeats = 40;
  bool subtract_accidentals = false;
  std::optional<double> unwrap_hint_deg;

  friend bool operator==(const AnalysisOptions&, const AnalysisOptions&) = default;
};

struct Scenario {
  Geometry geometry;
  std::vector<Angle> angles = default_angle_grid();
  ApparatusConfig apparatus;
  std::optional<SampleSpec> sample;
  AnalysisOptions analysis;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

Scenario scenario_from_preset(const Preset& preset);

/// Throws ParseError with codes E_SYNTAX, E_UNKNOWN_KEY, E_DUPLICATE_KEY,
/// E_VALUE (unparsable) or E_RANGE (parsed but invalid), naming key and line.
Scenario parse_scenario(std::string_view text);

std::string format_scenario(const Scenario& scenario);

/// `preset:<name>` or a path to a scenario file.
Scenario load_scenario(const std::string& ref);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace ghostpol
