#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace storyeval {

/// A record line that could not be decoded into the canonical layout.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", field '" +
                           field + "': " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// A decoded record that breaks one of the record invariants.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::size_t line, std::string invariant)
      : std::runtime_error(line == 0 ? invariant
                                     : "line " + std::to_string(line) + ": " +
                                           invariant),
        line_(line),
        invariant_(std::move(invariant)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::size_t line_;
  std::string invariant_;
};

enum class ResourceErrorKind {
  kEmptyFile,
  kDimensionMismatch,
  kRatingOutOfRange,
  kMalformedLine,
  kIo,
};

class ResourceError : public std::runtime_error {
 public:
  ResourceError(ResourceErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ResourceErrorKind kind() const noexcept { return kind_; }

 private:
  ResourceErrorKind kind_;
};

}  // namespace storyeval
