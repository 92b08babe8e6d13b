#pragma once

#include <cstddef>
#include <exception>
#include <string>

namespace spanforge {

// Base of every error the toolkit raises. Each subclass maps to one failure
// class (and one CLI exit code).
class Error : public std::exception {
 public:
  explicit Error(std::string what) : what_(std::move(what)) {}
  const char* what() const noexcept override { return what_.c_str(); }

  // Prefixes "context: " to the message; the dynamic type is kept so callers
  // can `throw;` after adding context.
  void add_context(const std::string& context) { what_ = context + ": " + what_; }

 private:
  std::string what_;
};

// Bad or inconsistent configuration: missing files, invalid thresholds,
// a dependency filter without a distance matrix, and so on.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A file does not conform to its schema. `line` is the 1-based record/line
// number when known, 0 otherwise.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Data violates a domain invariant (out-of-range index, duplicate id, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A checksum did not match its payload.
class IntegrityError : public Error {
 public:
  IntegrityError(const std::string& expected, const std::string& actual)
      : Error("checksum mismatch: expected " + expected + ", actual " + actual),
        expected_(expected),
        actual_(actual) {}
  const std::string& expected() const noexcept { return expected_; }
  const std::string& actual() const noexcept { return actual_; }

 private:
  std::string expected_;
  std::string actual_;
};

// Malformed dependency structure, e.g. a head cycle.
class StructureError : public Error {
 public:
  using Error::Error;
};

}  // namespace spanforge
