#pragma once

#include <stdexcept>
#include <string>

namespace ghostpol {

/// Base of every error the library throws. `code()` is a stable short
/// identifier used as the machine-parsable prefix of CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Argument outside the operation's domain (visibility > 1, empty grid, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("E_DOMAIN", what) {}
};

/// Unknown preset or enumerator name.
class LookupError : public Error {
 public:
  explicit LookupError(const std::string& what) : Error("E_LOOKUP", what) {}
};

/// Fewer than three distinct polarizer angles (mod 180 deg).
class UnderdeterminedFit : public Error {
 public:
  explicit UnderdeterminedFit(const std::string& what)
      : Error("E_UNDERDETERMINED", what) {}
};

/// Fringe amplitude indistinguishable from noise, or a zero CHSH denominator.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what)
      : Error("E_DEGENERATE", what) {}
};

/// Scenario or CSV text that cannot be turned into valid configuration.
/// `line` is 1-based; 0 when the problem is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::string code, int line, std::string key, const std::string& what)
      : Error(std::move(code), format(line, key, what)), line_(line), key_(std::move(key)) {}

  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  static std::string format(int line, const std::string& key, const std::string& what) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += "'" + key + "': ";
    return out + what;
  }

  int line_;
  std::string key_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("E_IO", what) {}
};

}  // namespace ghostpol
