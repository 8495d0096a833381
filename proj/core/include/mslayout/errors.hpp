#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mslayout {

/// Raised when caller-supplied data violates a documented precondition
/// (shape mismatch, degenerate polygon, unknown category, ...). The CLI maps
/// it to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed manifest content, located by 1-based line number and field.
class ManifestError : public ValidationError {
 public:
  ManifestError(std::size_t line, std::string field, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ", field '" + field + "': " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace mslayout
