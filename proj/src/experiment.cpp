#include "ghostpol/experiment.hpp"

#include <cmath>

#include "ghostpol/errors.hpp"
#include "ghostpol/rng.hpp"

namespace ghostpol {

namespace {

bool finite_nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }
bool unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

enum Channel : std::uint64_t { kSinglesSample = 0, kSinglesReference = 1, kCoincidence = 2 };

}  // namespace

FringeSense fringe_sense(const Geometry& geometry) {
  if (geometry.mode == GeometryMode::ghost && geometry.rotating_arm == Arm::reference)
    return FringeSense::mirrored;
  return FringeSense::direct;
}

void validate(const ApparatusConfig& a) {
  require(finite_nonnegative(a.pair_rate), "pair_rate must be >= 0");
  require(unit_interval(a.eta_sample), "eta_sample must lie in [0, 1]");
  require(unit_interval(a.eta_reference), "eta_reference must lie in [0, 1]");
  require(finite_nonnegative(a.bg_sample), "bg_sample must be >= 0");
  require(finite_nonnegative(a.bg_reference), "bg_reference must be >= 0");
  require(std::isfinite(a.gate_time) && a.gate_time > 0.0, "gate_time must be > 0");
  require(std::isfinite(a.dwell_time) && a.dwell_time > 0.0, "dwell_time must be > 0");
  require(unit_interval(a.visibility), "visibility must lie in [0, 1]");
}

void validate(const SampleSpec& s) {
  require(std::isfinite(s.specific_rotation), "specific_rotation must be finite");
  require(std::isfinite(s.length) && s.length >= 0.0, "length must be >= 0");
  require(s.transmission > 0.0 && s.transmission <= 1.0, "transmission must lie in (0, 1]");
}

void validate(const Geometry& g) {
  require(std::isfinite(g.fixed_angle.deg()), "fixed_angle must be finite");
  require(g.mode == GeometryMode::ghost || g.rotating_arm == Arm::sample,
          "heralded geometry has no reference-arm polarizer; rotating_arm must be sample");
}

Rates rates_at(GeometryMode mode, const ApparatusConfig& a, const std::optional<SampleSpec>& sample,
               Angle first, Angle second) {
  const double transmission = sample ? sample->transmission : 1.0;
  const auto cell = sample ? rotator(sample->rotation()) : identity_element();
  const auto source = werner_like(a.visibility);

  double p_sample = 0.0;
  double p_reference = 0.0;
  double p_coincidence = 0.0;
  if (mode == GeometryMode::ghost) {
    const auto rho = apply_local(source, Arm::sample, cell);
    p_sample = singles_probability(rho, Arm::sample, first);
    p_reference = singles_probability(rho, Arm::reference, second);
    p_coincidence = coincidence_probability(rho, first, second);
  } else {
    auto rho = apply_local(source, Arm::sample, polarizer(first));
    rho = apply_local(rho, Arm::sample, cell);
    rho = apply_local(rho, Arm::sample, polarizer(second));
    p_sample = rho.trace();
    p_reference = singles_probability(source, Arm::reference, std::nullopt);
    p_coincidence = p_sample;
  }

  Rates r;
  r.sample = a.pair_rate * a.eta_sample * transmission * p_sample + a.bg_sample;
  r.reference = a.pair_rate * a.eta_reference * p_reference + a.bg_reference;
  r.accidental = accidental_rate(r.sample, r.reference, a.gate_time);
  r.coincidence =
      a.pair_rate * a.eta_sample * a.eta_reference * transmission * p_coincidence + r.accidental;
  return r;
}

Rates expected_rates(const Geometry& g, const ApparatusConfig& a,
                     const std::optional<SampleSpec>& sample, Angle angle) {
  if (g.mode == GeometryMode::heralded) return rates_at(g.mode, a, sample, g.fixed_angle, angle);
  if (g.rotating_arm == Arm::reference) return rates_at(g.mode, a, sample, g.fixed_angle, angle);
  return rates_at(g.mode, a, sample, angle, g.fixed_angle);
}

std::uint64_t draw_count(std::uint64_t seed, std::uint64_t index, std::uint64_t channel,
                         double mean) {
  SplitMix64 rng(derive_seed(derive_seed(seed, index), channel));
  return sample_poisson(rng, mean);
}

SweepResult simulate_sweep(const Geometry& g, const ApparatusConfig& a,
                           const std::optional<SampleSpec>& sample, std::span<const Angle> angles) {
  validate(g);
  validate(a);
  if (sample) validate(*sample);
  if (angles.empty()) throw DomainError("angle list is empty");
  if (angles.size() < 4) throw DomainError("a sweep needs at least 4 angles");
  for (std::size_t i = 1; i < angles.size(); ++i)
    require(angles[i - 1] < angles[i], "sweep angles must be strictly increasing");

  SweepResult out{g, a, sample, {}};
  out.records.reserve(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const Rates r = expected_rates(g, a, sample, angles[i]);
    CountRecord rec;
    rec.angle = angles[i];
    rec.duration = a.dwell_time;
    rec.singles_sample = draw_count(a.rng_seed, i, kSinglesSample, r.sample * a.dwell_time);
    rec.singles_reference = draw_count(a.rng_seed, i, kSinglesReference, r.reference * a.dwell_time);
    rec.coincidences = draw_count(a.rng_seed, i, kCoincidence, r.coincidence * a.dwell_time);
    out.records.push_back(rec);
  }
  return out;
}

std::vector<Angle> angle_grid(double start_deg, double step_deg, std::size_t count) {
  std::vector<Angle> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(Angle::degrees(start_deg + step_deg * static_cast<double>(i)));
  return out;
}

std::vector<Angle> default_angle_grid() { return angle_grid(0.0, 10.0, 36); }

}  // namespace ghostpol
