#pragma once

#include <stdexcept>
#include <string>

namespace fracflow {

/// Raised for precondition and validation failures across the library.
/// The message is user-facing and stable (tests match on it).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracflow
