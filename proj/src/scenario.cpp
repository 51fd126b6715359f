#include "ghostpol/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ghostpol/errors.hpp"

namespace ghostpol {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string_view value;
  int line;
  std::string key;
};

[[noreturn]] void fail(const char* code, const Entry& e, const std::string& what) {
  throw ParseError(code, e.line, e.key, what);
}

double to_double(const Entry& e) {
  double v = 0.0;
  const auto* first = e.value.data();
  const auto* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    fail("E_VALUE", e, "expected a finite number, got '" + std::string(e.value) + "'");
  return v;
}

std::uint64_t to_u64(const Entry& e) {
  std::uint64_t v = 0;
  const auto* first = e.value.data();
  const auto* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    fail("E_VALUE", e, "expected a non-negative integer, got '" + std::string(e.value) + "'");
  return v;
}

bool to_bool(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail("E_VALUE", e, "expected true or false, got '" + std::string(e.value) + "'");
}

void check(bool ok, const Entry& e, const std::string& what) {
  if (!ok) fail("E_RANGE", e, what);
}

double in_unit(const Entry& e) {
  const double v = to_double(e);
  check(v >= 0.0 && v <= 1.0, e, "must lie in [0, 1], got " + std::string(e.value));
  return v;
}

double nonnegative(const Entry& e) {
  const double v = to_double(e);
  check(v >= 0.0, e, "must be >= 0, got " + std::string(e.value));
  return v;
}

double positive(const Entry& e) {
  const double v = to_double(e);
  check(v > 0.0, e, "must be > 0, got " + std::string(e.value));
  return v;
}

std::vector<Angle> parse_angles(const Entry& e) {
  std::vector<Angle> out;
  if (e.value.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::string_view rest = e.value;
    for (;;) {
      const auto pos = rest.find(':');
      Entry part{trim(rest.substr(0, pos)), e.line, e.key};
      parts.push_back(to_double(part));
      if (pos == std::string_view::npos) break;
      rest = rest.substr(pos + 1);
    }
    if (parts.size() != 3) fail("E_VALUE", e, "range must be start:step:stop");
    const double start = parts[0], step = parts[1], stop = parts[2];
    check(step > 0.0 && stop >= start, e, "range needs step > 0 and stop >= start");
    const double span = (stop - start) / step;
    const auto count = static_cast<std::size_t>(std::llround(span)) + 1;
    check(std::abs(span - std::round(span)) < 1e-9, e, "stop must be start + k * step");
    out = angle_grid(start, step, count);
  } else {
    std::string_view rest = e.value;
    for (;;) {
      const auto pos = rest.find(',');
      Entry part{trim(rest.substr(0, pos)), e.line, e.key};
      out.push_back(Angle::degrees(to_double(part)));
      if (pos == std::string_view::npos) break;
      rest = rest.substr(pos + 1);
    }
  }
  check(out.size() >= 4, e, "at least 4 angles are required");
  for (std::size_t i = 1; i < out.size(); ++i)
    check(out[i - 1] < out[i], e, "angles must be strictly increasing");
  return out;
}

using Setter = std::function<void(Scenario&, const Entry&)>;

const std::map<std::string, std::map<std::string, Setter>>& grammar() {
  static const std::map<std::string, std::map<std::string, Setter>> g = {
      {"geometry",
       {
           {"mode",
            [](Scenario& s, const Entry& e) {
              if (e.value == "ghost")
                s.geometry.mode = GeometryMode::ghost;
              else if (e.value == "heralded")
                s.geometry.mode = GeometryMode::heralded;
              else
                fail("E_VALUE", e, "expected ghost or heralded");
            }},
           {"rotating_arm",
            [](Scenario& s, const Entry& e) {
              if (e.value == "sample")
                s.geometry.rotating_arm = Arm::sample;
              else if (e.value == "reference")
                s.geometry.rotating_arm = Arm::reference;
              else
                fail("E_VALUE", e, "expected sample or reference");
            }},
           {"fixed_angle_deg",
            [](Scenario& s, const Entry& e) { s.geometry.fixed_angle = Angle::degrees(to_double(e)); }},
           {"angles_deg", [](Scenario& s, const Entry& e) { s.angles = parse_angles(e); }},
       }},
      {"apparatus",
       {
           {"pair_rate", [](Scenario& s, const Entry& e) { s.apparatus.pair_rate = nonnegative(e); }},
           {"eta_sample", [](Scenario& s, const Entry& e) { s.apparatus.eta_sample = in_unit(e); }},
           {"eta_reference",
            [](Scenario& s, const Entry& e) { s.apparatus.eta_reference = in_unit(e); }},
           {"bg_sample", [](Scenario& s, const Entry& e) { s.apparatus.bg_sample = nonnegative(e); }},
           {"bg_reference",
            [](Scenario& s, const Entry& e) { s.apparatus.bg_reference = nonnegative(e); }},
           {"gate_time_s", [](Scenario& s, const Entry& e) { s.apparatus.gate_time = positive(e); }},
           {"dwell_time_s", [](Scenario& s, const Entry& e) { s.apparatus.dwell_time = positive(e); }},
           {"visibility", [](Scenario& s, const Entry& e) { s.apparatus.visibility = in_unit(e); }},
           {"rng_seed", [](Scenario& s, const Entry& e) { s.apparatus.rng_seed = to_u64(e); }},
       }},
      {"sample",
       {
           {"specific_rotation_deg_per_cm",
            [](Scenario& s, const Entry& e) { s.sample->specific_rotation = to_double(e); }},
           {"length_cm", [](Scenario& s, const Entry& e) { s.sample->length = nonnegative(e); }},
           {"transmission",
            [](Scenario& s, const Entry& e) {
              const double v = to_double(e);
              check(v > 0.0 && v <= 1.0, e, "must lie in (0, 1], got " + std::string(e.value));
              s.sample->transmission = v;
            }},
       }},
      {"analysis",
       {
           {"channel",
            [](Scenario& s, const Entry& e) {
              if (e.value == "coincidence")
                s.analysis.channel = FitChannel::coincidence;
              else if (e.value == "singles_sample")
                s.analysis.channel = FitChannel::singles_sample;
              else
                fail("E_VALUE", e, "expected coincidence or singles_sample");
            }},
           {"repeats",
            [](Scenario& s, const Entry& e) {
              const auto v = to_u64(e);
              check(v >= 1 && v <= 1000000, e, "must lie in [1, 1000000]");
              s.analysis.repeats = static_cast<int>(v);
            }},
           {"subtract_accidentals",
            [](Scenario& s, const Entry& e) { s.analysis.subtract_accidentals = to_bool(e); }},
           {"unwrap_hint_deg",
            [](Scenario& s, const Entry& e) { s.analysis.unwrap_hint_deg = to_double(e); }},
       }},
  };
  return g;
}

const char* mode_name(GeometryMode m) { return m == GeometryMode::ghost ? "ghost" : "heralded"; }
const char* arm_name(Arm a) { return a == Arm::sample ? "sample" : "reference"; }

std::string format_angles(const std::vector<Angle>& angles) {
  if (angles.size() >= 2) {
    const double start = angles.front().deg();
    const double step = angles[1].deg() - start;
    if (step > 0.0 && angle_grid(start, step, angles.size()) == angles)
      return format_double(start) + ":" + format_double(step) + ":" +
             format_double(angles.back().deg());
  }
  std::string out;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (i) out += ", ";
    out += format_double(angles[i].deg());
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

Scenario scenario_from_preset(const Preset& preset) {
  Scenario s;
  s.geometry = preset.geometry;
  s.apparatus = preset.apparatus;
  s.sample = preset.sample;
  return s;
}

Scenario parse_scenario(std::string_view text) {
  Scenario s = scenario_from_preset(paper_preset("ghost_blank"));
  const auto& g = grammar();

  std::string section;
  std::set<std::string> seen;
  std::optional<int> arm_line;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("E_SYNTAX", line_no, "", "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!g.contains(section))
        throw ParseError("E_UNKNOWN_KEY", line_no, section, "unknown section");
      if (seen.contains("[" + section + "]"))
        throw ParseError("E_DUPLICATE_KEY", line_no, section, "section appears twice");
      seen.insert("[" + section + "]");
      if (section == "sample") s.sample = SampleSpec{};
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("E_SYNTAX", line_no, "", "expected 'key = value' or '[section]'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("E_SYNTAX", line_no, "", "missing key before '='");
    if (section.empty())
      throw ParseError("E_SYNTAX", line_no, key, "key outside of any [section]");
    const auto& keys = g.at(section);
    const auto it = keys.find(key);
    if (it == keys.end())
      throw ParseError("E_UNKNOWN_KEY", line_no, key, "unknown key in [" + section + "]");
    const std::string full = section + "." + key;
    if (seen.contains(full)) throw ParseError("E_DUPLICATE_KEY", line_no, key, "key given twice");
    seen.insert(full);
    if (value.empty()) throw ParseError("E_VALUE", line_no, key, "missing value");

    it->second(s, Entry{value, line_no, key});
    if (full == "geometry.rotating_arm") arm_line = line_no;
  }

  if (s.geometry.mode == GeometryMode::heralded && s.geometry.rotating_arm == Arm::reference) {
    if (arm_line)
      throw ParseError("E_RANGE", *arm_line, "rotating_arm",
                       "heralded geometry has no reference-arm polarizer");
    s.geometry.rotating_arm = Arm::sample;
  }
  return s;
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream o;
  o << "[geometry]\n"
    << "mode = " << mode_name(s.geometry.mode) << "\n"
    << "rotating_arm = " << arm_name(s.geometry.rotating_arm) << "\n"
    << "fixed_angle_deg = " << format_double(s.geometry.fixed_angle.deg()) << "\n"
    << "angles_deg = " << format_angles(s.angles) << "\n\n";
  const auto& a = s.apparatus;
  o << "[apparatus]\n"
    << "pair_rate = " << format_double(a.pair_rate) << "\n"
    << "eta_sample = " << format_double(a.eta_sample) << "\n"
    << "eta_reference = " << format_double(a.eta_reference) << "\n"
    << "bg_sample = " << format_double(a.bg_sample) << "\n"
    << "bg_reference = " << format_double(a.bg_reference) << "\n"
    << "gate_time_s = " << format_double(a.gate_time) << "\n"
    << "dwell_time_s = " << format_double(a.dwell_time) << "\n"
    << "visibility = " << format_double(a.visibility) << "\n"
    << "rng_seed = " << a.rng_seed << "\n";
  if (s.sample) {
    o << "\n[sample]\n"
      << "specific_rotation_deg_per_cm = " << format_double(s.sample->specific_rotation) << "\n"
      << "length_cm = " << format_double(s.sample->length) << "\n"
      << "transmission = " << format_double(s.sample->transmission) << "\n";
  }
  o << "\n[analysis]\n"
    << "channel = "
    << (s.analysis.channel == FitChannel::coincidence ? "coincidence" : "singles_sample") << "\n"
    << "repeats = " << s.analysis.repeats << "\n"
    << "subtract_accidentals = " << (s.analysis.subtract_accidentals ? "true" : "false") << "\n";
  if (s.analysis.unwrap_hint_deg)
    o << "unwrap_hint_deg = " << format_double(*s.analysis.unwrap_hint_deg) << "\n";
  return o.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return ss.str();
}

Scenario load_scenario(const std::string& ref) {
  constexpr std::string_view prefix = "preset:";
  if (ref.starts_with(prefix)) return scenario_from_preset(paper_preset(ref.substr(prefix.size())));
  return parse_scenario(read_text_file(ref));
}

}  // namespace ghostpol
