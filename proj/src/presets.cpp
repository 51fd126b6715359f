#include <array>

#include "ghostpol/errors.hpp"
#include "ghostpol/experiment.hpp"

namespace ghostpol {

namespace {

// Bench numbers: singles S = 19000/s and R = 36000/s behind polarizers,
// mean ghost coincidence rate 140/s including ~1.04/s of accidentals.
// The split between down-converted pairs (pair_rate * eta) and uncorrelated
// background is not published; eta = 0.1 per arm is an assumption.
constexpr double kPairRate = 55583.3;
constexpr double kEta = 0.1;
constexpr double kBgSample = 16220.835;
constexpr double kBgReference = 33220.835;
constexpr double kGateTime = 1.523e-9;
constexpr double kScanDwell = 12.2;
constexpr double kChshDwell = 3.5;
constexpr double kVisibility = 0.845;  // S = 2.39 inverted through S = 2 sqrt(2) V

constexpr double kLimoneneRotation = 12.4;  // deg/cm
constexpr double kCellTransmission = 0.85;

ApparatusConfig bench(double dwell, std::uint64_t seed) {
  ApparatusConfig a;
  a.pair_rate = kPairRate;
  a.eta_sample = kEta;
  a.eta_reference = kEta;
  a.bg_sample = kBgSample;
  a.bg_reference = kBgReference;
  a.gate_time = kGateTime;
  a.dwell_time = dwell;
  a.visibility = kVisibility;
  a.rng_seed = seed;
  return a;
}

SampleSpec limonene(double length_cm) {
  return {kLimoneneRotation, length_cm, kCellTransmission};
}

Geometry ghost() { return {GeometryMode::ghost, Arm::reference, Angle::degrees(0.0)}; }
Geometry heralded() { return {GeometryMode::heralded, Arm::sample, Angle::degrees(0.0)}; }

const std::array kPresets = {
    Preset{"ghost_blank", ghost(), bench(kScanDwell, 1100), std::nullopt},
    Preset{"ghost_limonene_1cm", ghost(), bench(kScanDwell, 1101), limonene(1.0)},
    Preset{"ghost_limonene_2cm", ghost(), bench(kScanDwell, 1102), limonene(2.0)},
    Preset{"ghost_limonene_5cm", ghost(), bench(kScanDwell, 1105), limonene(5.0)},
    Preset{"heralded_blank", heralded(), bench(kScanDwell, 2100), std::nullopt},
    Preset{"heralded_limonene_1cm", heralded(), bench(kScanDwell, 2101), limonene(1.0)},
    Preset{"heralded_limonene_2cm", heralded(), bench(kScanDwell, 2102), limonene(2.0)},
    Preset{"heralded_limonene_5cm", heralded(), bench(kScanDwell, 2105), limonene(5.0)},
    Preset{"chsh_bare", ghost(), bench(kChshDwell, 3100), std::nullopt},
    Preset{"chsh_1cm", ghost(), bench(kChshDwell, 3101), limonene(1.0)},
};

}  // namespace

Preset paper_preset(std::string_view name) {
  for (const auto& p : kPresets)
    if (p.name == name) return p;
  throw LookupError("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.push_back(p.name);
  return out;
}

}  // namespace ghostpol
