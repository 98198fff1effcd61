#pragma once

#include <stdexcept>
#include <string>

namespace dyson {

// Argument outside the mathematical domain of an operation (self-coupling,
// alpha <= 1, event site outside the volume, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Missing entry in an explicit site table.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Site index outside a volume.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Problem too large for the requested method (e.g. exhaustive enumeration).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Invalid run or experiment configuration. `key` names the offending entry
// when one is known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string key = {})
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Operation not defined for the given variant (e.g. field_gain on a
// non-decaying field).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A certified numerical bound could not be met within the allowed budget.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated structural invariant of a value type.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace dyson
