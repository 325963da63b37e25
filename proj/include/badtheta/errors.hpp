#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace badtheta {

/// Base class for every failure the library reports on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The rational truncation of θ is too coarse for the requested height range.
class PrecisionExhausted : public Error {
 public:
  PrecisionExhausted(const std::string& what, std::int64_t extra_digits)
      : Error(what), extra_digits_(extra_digits) {}

  /// Rough number of additional decimal digits of θ needed to pass the guard.
  std::int64_t extra_digits() const noexcept { return extra_digits_; }

 private:
  std::int64_t extra_digits_;
};

/// A zero of the linear form, or an exact ζ tie, inside the enumeration range.
class DegenerateForm : public Error {
 public:
  using Error::Error;
};

/// The best approximation sequence does not reach the required height.
class IncompleteSequence : public Error {
 public:
  using Error::Error;
};

class NoBaseFound : public Error {
 public:
  using Error::Error;
};

/// Every child of the current rectangle was killed.
class NoSurvivor : public Error {
 public:
  NoSurvivor(const std::string& what, unsigned level) : Error(what), level_(level) {}
  unsigned level() const noexcept { return level_; }

 private:
  unsigned level_;
};

/// Malformed input: bad rational literal, invalid configuration, schema mismatch.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace badtheta
