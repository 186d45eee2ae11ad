#pragma once

#include <stdexcept>
#include <string>

namespace serkit {

// Malformed user input: bad files, inconsistent flags, schema violations.
// The CLI maps this to exit code 2; any other exception escaping to main is
// treated as an internal error (exit code 1).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace serkit
