#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace holds {

enum class ErrorKind {
  CalibrationOverflow,
  StateSpaceTooLarge,
  ZeroBaseline,
  ConfigError,
  EmptyScenario,
  MissingBaseline,
  InvalidScenario,
  ParseError,
  FileError,
  UsageError,
};

std::string_view to_string(ErrorKind kind);

// All library failures surface as this exception. The CLI prints
// "error: <Kind>: <message>" on one line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace holds
