#pragma once

#include <stdexcept>
#include <string>

namespace expertise {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an enumeration (partitions, worlds, sequence spaces) would
// exceed the configured limits. Callers are expected to fail loudly rather
// than sample.
struct BudgetExceeded : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        pos(position) {}
  std::size_t pos;
};

struct InvalidReport : Error {
  using Error::Error;
};

struct InvalidScenario : Error {
  using Error::Error;
};

}  // namespace expertise
