#include "ghostpol/sweep_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "ghostpol/errors.hpp"
#include "ghostpol/scenario.hpp"

namespace ghostpol {

namespace {

template <typename T>
T parse_field(std::string_view field, int line, const char* name) {
  T v{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError("E_CSV", line, name, "cannot parse '" + std::string(field) + "'");
  return v;
}

}  // namespace

std::string write_sweep_csv(std::span<const CountRecord> records) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += format_double(r.angle.deg());
    out += ',' + std::to_string(r.singles_sample);
    out += ',' + std::to_string(r.singles_reference);
    out += ',' + std::to_string(r.coincidences);
    out += ',' + format_double(r.duration);
    out += '\n';
  }
  return out;
}

std::vector<CountRecord> read_sweep_csv(std::string_view text) {
  static constexpr const char* kNames[] = {"angle_deg", "singles_sample", "singles_reference",
                                           "coincidences", "duration_s"};
  std::vector<CountRecord> out;
  int line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (!header_seen) {
      if (line != kSweepCsvHeader)
        throw ParseError("E_CSV", line_no, "", "expected header '" + std::string(kSweepCsvHeader) + "'");
      header_seen = true;
      continue;
    }

    std::string_view fields[5];
    std::size_t n = 0;
    for (;;) {
      const auto comma = line.find(',');
      if (n == 5) throw ParseError("E_CSV", line_no, "", "too many fields");
      fields[n++] = line.substr(0, comma);
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (n != 5) throw ParseError("E_CSV", line_no, "", "expected 5 fields, got " + std::to_string(n));

    CountRecord r;
    const double angle = parse_field<double>(fields[0], line_no, kNames[0]);
    if (!std::isfinite(angle)) throw ParseError("E_CSV", line_no, kNames[0], "angle must be finite");
    r.angle = Angle::degrees(angle);
    r.singles_sample = parse_field<std::uint64_t>(fields[1], line_no, kNames[1]);
    r.singles_reference = parse_field<std::uint64_t>(fields[2], line_no, kNames[2]);
    r.coincidences = parse_field<std::uint64_t>(fields[3], line_no, kNames[3]);
    r.duration = parse_field<double>(fields[4], line_no, kNames[4]);
    if (!(r.duration > 0.0) || !std::isfinite(r.duration))
      throw ParseError("E_CSV", line_no, kNames[4], "duration must be > 0");
    if (!out.empty() && !(out.back().angle < r.angle))
      throw ParseError("E_CSV", line_no, kNames[0], "angles must be strictly increasing");
    out.push_back(r);
  }
  if (!header_seen) throw ParseError("E_CSV", 0, "", "empty sweep file");
  return out;
}

std::vector<CountRecord> load_sweep_csv(const std::filesystem::path& path) {
  try {
    return read_sweep_csv(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(e.code(), 0, "", path.string() + ": " + e.what());
  }
}

void save_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace ghostpol
