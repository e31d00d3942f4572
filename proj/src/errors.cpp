#include "transmute/errors.hpp"

namespace transmute {

namespace {

std::string caret_message(std::size_t position, const std::string& expected,
                          const std::string& source) {
  std::string msg = "parse error at position " + std::to_string(position) +
                    ": expected " + expected;
  if (!source.empty()) {
    msg += "\n  " + source + "\n  " + std::string(position, ' ') + "^";
  }
  return msg;
}

}  // namespace

ParseError::ParseError(std::size_t position, std::string expected, const std::string& source)
    : Error(caret_message(position, expected, source)),
      position_(position),
      expected_(std::move(expected)) {}

const char* to_string(WarningCode code) {
  switch (code) {
    case WarningCode::TailStagnant: return "TailStagnant";
    case WarningCode::Cancellation: return "CancellationWarning";
    case WarningCode::Magnitude: return "MagnitudeWarning";
    case WarningCode::NearDegenerate: return "NearDegenerate";
  }
  return "Unknown";
}

}  // namespace transmute
