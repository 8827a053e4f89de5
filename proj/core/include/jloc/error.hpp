#pragma once

#include <stdexcept>
#include <string>

namespace jloc {

/// Malformed or missing input data (files, records, timesteps).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be decoded. Carries the byte offset or line number in the message.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or internal invariant was broken by the caller or by us.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace jloc
