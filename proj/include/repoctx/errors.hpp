#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace repoctx {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IngestError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct CountError : Error {
  using Error::Error;
};

struct RopeError : Error {
  using Error::Error;
};

struct PlanError : Error {
  using Error::Error;
};

struct SynthError : Error {
  using Error::Error;
};

struct BenchError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// A JSON Lines record that failed to parse; line is 1-based.
struct RecordError : Error {
  RecordError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

}  // namespace repoctx
