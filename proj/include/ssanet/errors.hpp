#pragma once

#include <stdexcept>
#include <string>

namespace ssanet {

/// Shapes or lengths that do not agree.
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Input outside the domain where a quantity is defined (empty sequence, single-class AUC, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// An objective returned a non-finite value.
class EvaluationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed text input. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Well-formed rows that violate the dataset schema (ragged T, wrong frame size, empty file).
class SchemaError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Name not present in a registry.
class LookupError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

/// MAPE requested over targets containing zeros without the exclusion policy.
class MapePolicyError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

}  // namespace ssanet
