#include "ghostpol/estimation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ghostpol/errors.hpp"
#include "ghostpol/parallel.hpp"
#include "ghostpol/rng.hpp"

namespace ghostpol {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

double sample_stddev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

std::size_t distinct_orientations(std::span<const Angle> angles) {
  std::vector<double> o;
  o.reserve(angles.size());
  for (const Angle& a : angles) o.push_back(wrap_orientation_deg(a.deg()));
  std::sort(o.begin(), o.end());
  std::size_t n = 0;
  for (std::size_t i = 0; i < o.size(); ++i)
    if (i == 0 || o[i] - o[i - 1] > 1e-9) ++n;
  // 0 and 179.999... are the same orientation
  if (n > 1 && o.front() + 180.0 - o.back() <= 1e-9) --n;
  return n;
}

}  // namespace

FringeFit fit_fringe(std::span<const CountRecord> records, const FitOptions& options) {
  std::vector<Angle> angles;
  std::vector<double> values;
  angles.reserve(records.size());
  values.reserve(records.size());
  double n_total = 0.0;
  for (const auto& r : records) {
    double value = options.channel == FitChannel::coincidence
                       ? static_cast<double>(r.coincidences)
                       : static_cast<double>(r.singles_sample);
    n_total += value;
    if (options.subtract_accidentals && options.channel == FitChannel::coincidence) {
      if (!(r.duration > 0.0)) throw DomainError("record duration must be > 0");
      value -= static_cast<double>(r.singles_sample) * static_cast<double>(r.singles_reference) *
               options.gate_time / r.duration;
    }
    angles.push_back(r.angle);
    values.push_back(value);
  }
  FringeFit fit = fit_fringe(angles, values);
  fit.n_total = n_total;
  return fit;
}

FringeFit fit_fringe(std::span<const Angle> angles, std::span<const double> values) {
  if (angles.size() != values.size()) throw DomainError("angles and values differ in length");
  if (angles.size() < 4)
    throw UnderdeterminedFit("fringe fit needs at least 4 points, got " +
                             std::to_string(angles.size()));
  if (distinct_orientations(angles) < 3)
    throw UnderdeterminedFit("fringe fit needs at least 3 distinct polarizer angles mod 180 deg");

  const auto n = static_cast<Eigen::Index>(angles.size());
  Eigen::MatrixX3d design(n, 3);
  Eigen::VectorXd y(n);
  double n_total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double two_theta = 2.0 * angles[k].rad();
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(two_theta);
    design(i, 2) = std::sin(two_theta);
    y(i) = values[k];
    n_total += values[k];
  }

  const Eigen::Vector3d beta = design.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd residual = y - design * beta;
  const double rss = residual.squaredNorm();
  const Eigen::Matrix3d cov =
      (rss / static_cast<double>(n - 3)) * (design.transpose() * design).inverse();

  FringeFit fit;
  fit.offset = beta(0);
  fit.amplitude = std::hypot(beta(1), beta(2));
  fit.residual_rms = std::sqrt(rss / static_cast<double>(n));
  fit.n_total = n_total;
  fit.phase = Angle::degrees(wrap_orientation_deg(0.5 * std::atan2(beta(2), beta(1)) * kDeg));

  const double a1 = beta(1);
  const double a2 = beta(2);
  const double amp = fit.amplitude;
  if (amp > 0.0) {
    const Eigen::Vector2d g_amp(a1 / amp, a2 / amp);
    const Eigen::Vector2d g_psi(-a2 / (amp * amp), a1 / (amp * amp));
    const Eigen::Matrix2d c = cov.bottomRightCorner<2, 2>();
    fit.amplitude_stderr = std::sqrt(std::max(0.0, g_amp.dot(c * g_amp)));
    fit.phase_stderr = 0.5 * std::sqrt(std::max(0.0, g_psi.dot(c * g_psi)));
  } else {
    fit.amplitude_stderr = std::sqrt(std::max(cov(1, 1), cov(2, 2)));
    fit.phase_stderr = std::numbers::pi / 2.0;
  }

  const double floor = std::max(5.0 * fit.amplitude_stderr, 1e-9 * (std::abs(fit.offset) + 1.0));
  if (!(amp > floor))
    throw DegenerateError("fringe amplitude " + std::to_string(amp) +
                          " is not resolved from noise (5 sigma = " +
                          std::to_string(5.0 * fit.amplitude_stderr) + ")");
  return fit;
}

RotationMeasurement extract_rotation(const FringeFit& blank, const FringeFit& sample,
                                     std::optional<double> unwrap_hint_deg, FringeSense sense) {
  const double raw = static_cast<double>(static_cast<int>(sense)) *
                     (sample.phase.deg() - blank.phase.deg());
  RotationMeasurement m;
  m.delta_hat = wrap_half_turn_deg(raw, unwrap_hint_deg.value_or(0.0));
  m.n_repeats = 1;
  m.samples = {m.delta_hat};
  return m;
}

OrientationStats orientation_stats(std::span<const double> degrees,
                                   std::optional<double> center_deg) {
  OrientationStats out;
  if (degrees.empty()) return out;
  double center = 0.0;
  if (center_deg) {
    center = *center_deg;
  } else {
    double c = 0.0, s = 0.0;
    for (double d : degrees) {
      c += std::cos(2.0 * d / kDeg);
      s += std::sin(2.0 * d / kDeg);
    }
    center = 0.5 * std::atan2(s, c) * kDeg;
  }
  out.unwrapped.reserve(degrees.size());
  for (double d : degrees) out.unwrapped.push_back(wrap_half_turn_deg(d, center));
  out.mean = std::accumulate(out.unwrapped.begin(), out.unwrapped.end(), 0.0) /
             static_cast<double>(out.unwrapped.size());
  out.stddev = sample_stddev(out.unwrapped);
  return out;
}

std::vector<double> repeated_phases(const Geometry& geometry, const ApparatusConfig& apparatus,
                                    const std::optional<SampleSpec>& sample,
                                    std::span<const Angle> angles, int repeats,
                                    const RunOptions& options) {
  if (repeats < 1) throw DomainError("repeats must be >= 1");
  std::vector<double> phases(static_cast<std::size_t>(repeats));
  parallel_for(phases.size(), options.workers, [&](std::size_t rep) {
    ApparatusConfig a = apparatus;
    a.rng_seed = derive_seed(apparatus.rng_seed, rep);
    const auto sweep = simulate_sweep(geometry, a, sample, angles);
    phases[rep] = fit_fringe(sweep.records, options.fit).phase.deg();
  });
  return phases;
}

RotationMeasurement measure_rotation(const Geometry& geometry, const ApparatusConfig& blank,
                                     const ApparatusConfig& with_sample, const SampleSpec& sample,
                                     std::span<const Angle> angles, int repeats,
                                     const RunOptions& options) {
  if (repeats < 1) throw DomainError("repeats must be >= 1");
  const FringeSense sense = fringe_sense(geometry);
  std::vector<double> deltas(static_cast<std::size_t>(repeats));
  parallel_for(deltas.size(), options.workers, [&](std::size_t rep) {
    ApparatusConfig a = blank;
    a.rng_seed = derive_seed(blank.rng_seed, rep);
    ApparatusConfig b = with_sample;
    b.rng_seed = derive_seed(with_sample.rng_seed, rep);
    const auto fit_blank = fit_fringe(simulate_sweep(geometry, a, std::nullopt, angles).records,
                                      options.fit);
    const auto fit_sample =
        fit_fringe(simulate_sweep(geometry, b, sample, angles).records, options.fit);
    deltas[rep] =
        extract_rotation(fit_blank, fit_sample, options.unwrap_hint_deg, sense).delta_hat;
  });

  const auto stats = orientation_stats(deltas, options.unwrap_hint_deg);
  RotationMeasurement m;
  m.delta_hat = stats.mean;
  m.n_repeats = repeats;
  if (repeats >= 2) m.sigma = stats.stddev;
  m.samples = stats.unwrapped;
  return m;
}

double chsh_E(const std::array<double, 4>& c) {
  for (double v : c)
    if (!(v >= 0.0)) throw DomainError("CHSH counts must be non-negative");
  const double den = c[0] + c[1] + c[2] + c[3];
  if (!(den > 0.0)) throw DegenerateError("CHSH denominator is zero");
  return (c[0] + c[1] - c[2] - c[3]) / den;
}

ChshResult chsh_S(const Geometry& geometry, const ApparatusConfig& apparatus,
                  const std::optional<SampleSpec>& sample, const ChshSettings& settings,
                  int repeats, const ChshOptions& options) {
  if (geometry.mode != GeometryMode::ghost)
    throw DomainError("CHSH needs a polarizer in each arm (ghost geometry)");
  if (repeats < 1) throw DomainError("repeats must be >= 1");
  validate(apparatus);
  if (sample) validate(*sample);

  const Angle shift = (sample && options.compensate_rotation) ? sample->rotation() : Angle{};
  const Angle quarter = Angle::degrees(90.0);
  const std::array<std::pair<Angle, Angle>, 4> pairs = {{
      {settings.theta_s, settings.theta_r},
      {settings.theta_s, settings.theta_r_prime},
      {settings.theta_s_prime, settings.theta_r},
      {settings.theta_s_prime, settings.theta_r_prime},
  }};

  // 16 expected counts, in measurement order.
  std::array<double, 16> means{};
  for (std::size_t p = 0; p < 4; ++p) {
    const auto [a, b] = pairs[p];
    const std::array<std::pair<Angle, Angle>, 4> four = {{
        {a, b}, {a + quarter, b + quarter}, {a + quarter, b}, {a, b + quarter}}};
    for (std::size_t j = 0; j < 4; ++j) {
      const Rates r = rates_at(GeometryMode::ghost, apparatus, sample, four[j].first + shift,
                               four[j].second);
      const double rate = options.include_accidentals ? r.coincidence : r.coincidence - r.accidental;
      means[4 * p + j] = rate * apparatus.dwell_time;
    }
  }

  const auto n = static_cast<std::size_t>(repeats);
  std::vector<std::array<double, 4>> e(n);
  parallel_for(n, options.workers, [&](std::size_t rep) {
    const std::uint64_t seed = derive_seed(apparatus.rng_seed, rep);
    for (std::size_t p = 0; p < 4; ++p) {
      std::array<double, 4> counts{};
      for (std::size_t j = 0; j < 4; ++j) {
        const std::size_t k = 4 * p + j;
        counts[j] = options.exact ? means[k]
                                  : static_cast<double>(draw_count(seed, k, 2, means[k]));
      }
      e[rep][p] = chsh_E(counts);
    }
  });

  ChshResult out;
  out.repeats = repeats;
  out.S_per_repeat.reserve(n);
  for (const auto& row : e) {
    double s = 0.0;
    for (std::size_t p = 0; p < 4; ++p) {
      s += std::abs(row[p]);
      out.E_values[p] += row[p] / static_cast<double>(n);
    }
    out.S_per_repeat.push_back(s);
  }
  for (double v : out.E_values) out.S += std::abs(v);
  if (repeats >= 2) out.sigma_S = sample_stddev(out.S_per_repeat);
  return out;
}

double infer_visibility(double S) {
  const double s_max = 2.0 * std::numbers::sqrt2;
  if (!(S >= 0.0 && S <= s_max))
    throw DomainError("S must lie in [0, 2 sqrt 2], got " + std::to_string(S));
  return S / s_max;
}

std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("linear fit needs >= 2 points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixX2d design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = x[static_cast<std::size_t>(i)];
    design(i, 1) = 1.0;
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(rhs);
  return {beta(0), beta(1)};
}

double dwell_for_total(const Geometry& geometry, const ApparatusConfig& apparatus,
                       const std::optional<SampleSpec>& sample, std::span<const Angle> angles,
                       double n_total) {
  double rate_sum = 0.0;
  for (const Angle& a : angles) rate_sum += expected_rates(geometry, apparatus, sample, a).coincidence;
  if (!(rate_sum > 0.0)) throw DomainError("configuration produces no coincidences");
  if (!(n_total > 0.0)) throw DomainError("target coincidence count must be > 0");
  return n_total / rate_sum;
}

ScalingStudy scaling_study(const Geometry& geometry, const ApparatusConfig& apparatus,
                           const std::optional<SampleSpec>& sample, std::span<const Angle> angles,
                           std::span<const double> n_targets, int repeats,
                           const RunOptions& options) {
  if (n_targets.size() < 3) throw DomainError("scaling study needs at least 3 targets");
  const auto [lo, hi] = std::minmax_element(n_targets.begin(), n_targets.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0)
    throw DomainError("scaling targets must be positive and span at least two decades");
  if (repeats < 2) throw DomainError("scaling study needs repeats >= 2");

  ScalingStudy study;
  std::vector<double> log_n, log_sigma;
  for (std::size_t t = 0; t < n_targets.size(); ++t) {
    ApparatusConfig a = apparatus;
    a.dwell_time = dwell_for_total(geometry, apparatus, sample, angles, n_targets[t]);
    a.rng_seed = derive_seed(apparatus.rng_seed, t);

    const auto reps = static_cast<std::size_t>(repeats);
    std::vector<double> phases(reps), totals(reps);
    parallel_for(reps, options.workers, [&](std::size_t rep) {
      ApparatusConfig ar = a;
      ar.rng_seed = derive_seed(a.rng_seed, rep);
      const auto sweep = simulate_sweep(geometry, ar, sample, angles);
      const auto fit = fit_fringe(sweep.records, options.fit);
      phases[rep] = fit.phase.deg();
      double total = 0.0;
      for (const auto& r : sweep.records) total += static_cast<double>(r.coincidences);
      totals[rep] = total;
    });

    ScalingRow row;
    row.n_target = n_targets[t];
    row.dwell = a.dwell_time;
    row.repeats = repeats;
    row.n_mean = std::accumulate(totals.begin(), totals.end(), 0.0) / static_cast<double>(reps);
    row.sigma_phi = orientation_stats(phases).stddev / kDeg;
    row.k = row.sigma_phi * std::sqrt(row.n_mean);
    study.rows.push_back(row);
    log_n.push_back(std::log10(row.n_mean));
    log_sigma.push_back(std::log10(row.sigma_phi));
    study.k_mean += row.k / static_cast<double>(n_targets.size());
  }

  const auto [slope, intercept] = linear_fit(log_n, log_sigma);
  study.slope_log_n = slope;
  study.slope_inv_sqrt_n = -2.0 * slope;
  study.intercept_log = intercept;
  return study;
}

}  // namespace ghostpol
