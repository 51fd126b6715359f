#pragma once

// Bench geometries, detector rate model and Poisson count simulation.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ghostpol/angle.hpp"
#include "ghostpol/polarization.hpp"

namespace ghostpol {

struct ApparatusConfig {
  double pair_rate = 0.0;       // pairs/s at the source
  double eta_sample = 1.0;      // detection-path efficiency, sample arm
  double eta_reference = 1.0;   // detection-path efficiency, reference arm
  double bg_sample = 0.0;       // uncorrelated singles, counts/s
  double bg_reference = 0.0;
  double gate_time = 1.523e-9;  // coincidence window, s
  double dwell_time = 1.0;      // s per angle setting
  double visibility = 1.0;
  std::uint64_t rng_seed = 0;

  friend bool operator==(const ApparatusConfig&, const ApparatusConfig&) = default;
};

struct SampleSpec {
  double specific_rotation = 0.0;  // deg/cm
  double length = 0.0;             // cm
  double transmission = 1.0;

  Angle rotation() const { return Angle::degrees(specific_rotation * length); }

  friend bool operator==(const SampleSpec&, const SampleSpec&) = default;
};

enum class GeometryMode { ghost, heralded };

/// Ghost: one polarizer per arm, the cell sits before the sample-arm polarizer.
/// Heralded: input polarizer (at fixed_angle), cell, then the rotating analyzer,
/// all in the sample arm; the reference arm only heralds.
struct Geometry {
  GeometryMode mode = GeometryMode::ghost;
  Arm rotating_arm = Arm::reference;
  Angle fixed_angle = Angle::degrees(0.0);

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Direction in which the fitted fringe moves when the cell rotates the
/// polarization by +delta: `direct` when the rotating polarizer is downstream
/// of the cell, `mirrored` when it sits in the other arm of a Phi+ pair.
enum class FringeSense { direct = 1, mirrored = -1 };

FringeSense fringe_sense(const Geometry& geometry);

struct CountRecord {
  Angle angle;
  std::uint64_t singles_sample = 0;
  std::uint64_t singles_reference = 0;
  std::uint64_t coincidences = 0;
  double duration = 0.0;

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

struct SweepResult {
  Geometry geometry;
  ApparatusConfig apparatus;
  std::optional<SampleSpec> sample;
  std::vector<CountRecord> records;
};

struct Rates {
  double sample = 0.0;       // singles, counts/s
  double reference = 0.0;    // singles, counts/s
  double coincidence = 0.0;  // true + accidental, counts/s
  double accidental = 0.0;
};

/// Accidental coincidence rate of two uncorrelated streams.
constexpr double accidental_rate(double rate_sample, double rate_reference, double gate_time) {
  return rate_sample * rate_reference * gate_time;
}

void validate(const ApparatusConfig& apparatus);
void validate(const SampleSpec& sample);
void validate(const Geometry& geometry);

/// Rates with explicit polarizer settings. Ghost: `first` is the sample-arm
/// polarizer, `second` the reference-arm polarizer. Heralded: `first` is the
/// input polarizer, `second` the analyzer after the cell.
Rates rates_at(GeometryMode mode, const ApparatusConfig& apparatus,
               const std::optional<SampleSpec>& sample, Angle first, Angle second);

/// Rates with the rotating polarizer at `angle` and the other at fixed_angle.
Rates expected_rates(const Geometry& geometry, const ApparatusConfig& apparatus,
                     const std::optional<SampleSpec>& sample, Angle angle);

/// Independent Poisson counts per angle, deterministic in apparatus.rng_seed.
SweepResult simulate_sweep(const Geometry& geometry, const ApparatusConfig& apparatus,
                           const std::optional<SampleSpec>& sample, std::span<const Angle> angles);

/// Draws one count for setting `index` of a run seeded with `seed`; channel
/// separates the independent streams of one setting.
std::uint64_t draw_count(std::uint64_t seed, std::uint64_t index, std::uint64_t channel, double mean);

/// `count` angles from `start` in steps of `step`.
std::vector<Angle> angle_grid(double start_deg, double step_deg, std::size_t count);

/// 36 points, 10 degree spacing, one full turn of the polarizer.
std::vector<Angle> default_angle_grid();

struct Preset {
  std::string name;
  Geometry geometry;
  ApparatusConfig apparatus;
  std::optional<SampleSpec> sample;
};

inline constexpr std::string_view kPresetVersion = "1";

/// Configurations matched to the published bench (see README for the list).
Preset paper_preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace ghostpol
