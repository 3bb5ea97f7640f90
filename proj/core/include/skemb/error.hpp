#pragma once

#include <stdexcept>
#include <string>

namespace skemb {

// Invalid user-supplied parameter or configuration. CLI exit code 2.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed input data (update streams, label files, embedding files).
// CLI exit code 3.
class InputFormatError : public std::runtime_error {
 public:
  explicit InputFormatError(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal invariant (ownership violations, protocol bugs).
// CLI exit code 4.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace skemb
