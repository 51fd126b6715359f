#pragma once

// Sweep records as CSV:
//   angle_deg,singles_sample,singles_reference,coincidences,duration_s
// Doubles are written in shortest round-trip form, so write -> read -> write
// reproduces the bytes and the parsed records exactly.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ghostpol/experiment.hpp"

namespace ghostpol {

inline constexpr std::string_view kSweepCsvHeader =
    "angle_deg,singles_sample,singles_reference,coincidences,duration_s";

std::string write_sweep_csv(std::span<const CountRecord> records);

/// Throws ParseError (code E_CSV) with the offending line.
std::vector<CountRecord> read_sweep_csv(std::string_view text);

std::vector<CountRecord> load_sweep_csv(const std::filesystem::path& path);
void save_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace ghostpol
