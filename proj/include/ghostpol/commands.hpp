#pragma once

// Command implementations behind the `ghostpol` executable. Each command
// writes its report to `out`, diagnostics to `err`, and returns the process
// exit status. Errors are reported as one line: "ghostpol: <CODE>: <message>".

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ghostpol/estimation.hpp"

namespace ghostpol::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIoFailure = 3,
  kInputError = 4,       // scenario/CSV parse errors, unknown preset
  kEstimationError = 5,  // degenerate or underdetermined data, domain errors
  kCheckFailed = 6,      // a statistical check did not pass
};

struct SimulateArgs {
  std::string scenario;  // path or preset:<name>
  std::optional<std::uint64_t> seed;
  std::optional<double> dwell;
  std::string out;       // empty: CSV to stdout
};

struct FitArgs {
  std::string csv;
  FitOptions fit;
  std::string out;
};

struct RotationArgs {
  std::vector<std::string> blank;
  std::vector<std::string> sample;
  std::optional<double> unwrap_hint;
  FringeSense sense = FringeSense::direct;
  FitOptions fit;
  std::string out;
};

struct ChshArgs {
  std::string scenario;
  std::optional<int> repeats;
  std::optional<std::uint64_t> seed;
  std::optional<double> dwell;
  bool exact = false;
  int workers = 1;
  std::string out;
};

struct ScalingArgs {
  std::string scenario;
  std::vector<double> n_targets;
  std::optional<int> repeats;
  std::optional<std::uint64_t> seed;
  bool subtract_accidentals = false;
  int workers = 1;
  std::string out;
};

struct ReproduceArgs {
  int workers = 1;
  std::string out;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err);
int cmd_rotation(const RotationArgs& args, std::ostream& out, std::ostream& err);
int cmd_chsh(const ChshArgs& args, std::ostream& out, std::ostream& err);
int cmd_scaling(const ScalingArgs& args, std::ostream& out, std::ostream& err);
int cmd_reproduce_paper(const ReproduceArgs& args, std::ostream& out, std::ostream& err);
int cmd_preset(const std::string& name, std::ostream& out, std::ostream& err);

/// Runs `body`, converting library exceptions into a diagnostic line and an
/// exit status.
int run_guarded(std::ostream& err, const std::function<int()>& body);

/// One row of the paper-reproduction table.
struct PaperCheck {
  std::string name;
  std::string paper;
  std::string simulated;
  std::string criterion;
  bool pass = false;
};

std::vector<PaperCheck> reproduce_paper_checks(int workers);

}  // namespace ghostpol::cli
