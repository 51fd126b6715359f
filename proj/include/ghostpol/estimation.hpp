#pragma once

// Fringe fitting, optical-rotation extraction, CHSH statistics and the
// shot-noise scaling study.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "ghostpol/angle.hpp"
#include "ghostpol/experiment.hpp"

namespace ghostpol {

enum class FitChannel { coincidence, singles_sample };

struct FitOptions {
  FitChannel channel = FitChannel::coincidence;
  /// Remove S*R*dt*duration from each coincidence count before fitting.
  bool subtract_accidentals = false;
  double gate_time = 1.523e-9;
};

/// c(theta) = offset + amplitude * cos(2 (theta - phase)).
struct FringeFit {
  double offset = 0.0;
  double amplitude = 0.0;
  Angle phase;                  // polarization orientation, [0, 180) deg
  double residual_rms = 0.0;
  double n_total = 0.0;         // counts in the fitted channel
  double amplitude_stderr = 0.0;
  double phase_stderr = 0.0;    // radians, from the fit covariance

  /// offset >= amplitude - 3 * residual_rms (counts cannot go negative).
  bool plausible() const { return offset >= amplitude - 3.0 * residual_rms; }
};

/// Linear least squares in the basis (1, cos 2theta, sin 2theta).
/// Throws UnderdeterminedFit for < 4 records or < 3 distinct angles mod 180,
/// DegenerateError when the amplitude is within 5 standard errors of zero.
FringeFit fit_fringe(std::span<const CountRecord> records, const FitOptions& options = {});

/// Same fit on arbitrary real-valued samples.
FringeFit fit_fringe(std::span<const Angle> angles, std::span<const double> values);

struct RotationMeasurement {
  double delta_hat = 0.0;        // degrees
  std::optional<double> sigma;   // degrees, repeatability std (n_repeats >= 2)
  int n_repeats = 1;
  std::vector<double> samples;   // per-repetition estimates, degrees
};

/// delta = sense * (phi_sample - phi_blank), wrapped into (-90, 90] or into
/// the 180 degree window centred on `unwrap_hint_deg`.
RotationMeasurement extract_rotation(const FringeFit& blank, const FringeFit& sample,
                                     std::optional<double> unwrap_hint_deg = std::nullopt,
                                     FringeSense sense = FringeSense::direct);

/// Mean and sample std of orientations (mod 180). Values are unwrapped around
/// `center_deg` when given, otherwise around their circular mean.
struct OrientationStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> unwrapped;
};
OrientationStats orientation_stats(std::span<const double> degrees,
                                   std::optional<double> center_deg = std::nullopt);

struct RunOptions {
  int workers = 1;
  FitOptions fit;
  std::optional<double> unwrap_hint_deg;
};

/// Repeats blank and sample sweeps with per-repetition seeds derived from each
/// apparatus seed and reports the mean rotation and its repeatability std.
RotationMeasurement measure_rotation(const Geometry& geometry, const ApparatusConfig& blank,
                                     const ApparatusConfig& with_sample, const SampleSpec& sample,
                                     std::span<const Angle> angles, int repeats,
                                     const RunOptions& options = {});

/// Fitted phases (degrees) of `repeats` independent sweeps.
std::vector<double> repeated_phases(const Geometry& geometry, const ApparatusConfig& apparatus,
                                    const std::optional<SampleSpec>& sample,
                                    std::span<const Angle> angles, int repeats,
                                    const RunOptions& options = {});

/// Correlation from the counts C(a,b), C(a+90,b+90), C(a+90,b), C(a,b+90).
double chsh_E(const std::array<double, 4>& counts);

struct ChshSettings {
  Angle theta_s = Angle::degrees(22.5);
  Angle theta_r = Angle::degrees(0.0);
  Angle theta_s_prime = Angle::degrees(67.5);
  Angle theta_r_prime = Angle::degrees(45.0);
};

struct ChshOptions {
  /// Use expected counts (rate * dwell) instead of Poisson draws.
  bool exact = false;
  bool include_accidentals = true;
  /// Offset the sample-arm settings by the cell rotation.
  bool compensate_rotation = true;
  int workers = 1;
};

struct ChshResult {
  /// Mean E at (s,r), (s,r'), (s',r), (s',r').
  std::array<double, 4> E_values{};
  double S = 0.0;                 // sum of |E_values|
  std::optional<double> sigma_S;  // std of per-repetition S
  int repeats = 0;
  std::vector<double> S_per_repeat;
};

ChshResult chsh_S(const Geometry& geometry, const ApparatusConfig& apparatus,
                  const std::optional<SampleSpec>& sample, const ChshSettings& settings,
                  int repeats, const ChshOptions& options = {});

/// Visibility of the isotropic-noise model giving CHSH value S.
double infer_visibility(double S);

struct ScalingRow {
  double n_target = 0.0;
  double n_mean = 0.0;     // mean coincidences actually collected per sweep
  double dwell = 0.0;      // s per angle
  double sigma_phi = 0.0;  // radians
  double k = 0.0;          // sigma_phi * sqrt(n_mean)
  int repeats = 0;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  double slope_log_n = 0.0;        // d log sigma / d log n
  double slope_inv_sqrt_n = 0.0;   // d log sigma / d log (1/sqrt n)
  double intercept_log = 0.0;      // log10 sigma at n = 1
  double k_mean = 0.0;
};

/// Dwell time per angle at which one sweep expects `n_total` coincidences.
double dwell_for_total(const Geometry& geometry, const ApparatusConfig& apparatus,
                       const std::optional<SampleSpec>& sample, std::span<const Angle> angles,
                       double n_total);

/// For each target n the dwell time is scaled so one sweep collects about n
/// coincidences; sigma_phi is the phase std over `repeats` sweeps.
ScalingStudy scaling_study(const Geometry& geometry, const ApparatusConfig& apparatus,
                           const std::optional<SampleSpec>& sample, std::span<const Angle> angles,
                           std::span<const double> n_targets, int repeats,
                           const RunOptions& options = {});

/// Least-squares slope and intercept of y against x.
std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace ghostpol
