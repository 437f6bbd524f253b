#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lakecausal {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Malformed input file. Carries the 1-based line and offending field when known.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, std::string field, const std::string& what)
      : Error(format(source, line, field, what)),
        source_(std::move(source)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(const std::string& source, std::size_t line,
                            const std::string& field, const std::string& what) {
    std::string msg = source;
    if (line > 0) msg += ":" + std::to_string(line);
    if (!field.empty()) msg += " [" + field + "]";
    return msg + ": " + what;
  }

  std::string source_;
  std::size_t line_;
  std::string field_;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

// A unit appears on both sides of a train/test partition.
class LeakageError : public Error {
 public:
  using Error::Error;
};

}  // namespace lakecausal
