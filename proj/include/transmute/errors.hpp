#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace transmute {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (cut of Q_n,
/// |t| > |x|, Im w >= 1/2 for the Laguerre series, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The seed solution f has (numerically) a zero on the grid.
class SeedVanishes : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// Collocation basis is numerically degenerate; lower the basis size.
class BasisDegenerate : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  using Error::Error;
};

class ScanTooCoarse : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::string expected, const std::string& source);

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

enum class WarningCode { TailStagnant, Cancellation, Magnitude, NearDegenerate };

const char* to_string(WarningCode code);

struct Warning {
  WarningCode code;
  std::string message;
};

/// Non-fatal numerical diagnostics accumulated while building or evaluating.
class Diagnostics {
 public:
  void warn(WarningCode code, std::string message) {
    items_.push_back({code, std::move(message)});
  }
  void merge(const Diagnostics& other) {
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
  }
  bool empty() const noexcept { return items_.empty(); }
  bool has(WarningCode code) const noexcept {
    for (const auto& w : items_)
      if (w.code == code) return true;
    return false;
  }
  const std::vector<Warning>& items() const noexcept { return items_; }

 private:
  std::vector<Warning> items_;
};

}  // namespace transmute
