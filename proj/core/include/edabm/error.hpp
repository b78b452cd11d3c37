#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace edabm {

/// Input or configuration that violates a documented contract.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed row in one of the CSV/JSON interchange formats.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, std::string field, const std::string& message)
      : ValidationError("line " + std::to_string(line) + ", field '" + field +
                        "': " + message),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Failure raised while executing a simulation run.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edabm
