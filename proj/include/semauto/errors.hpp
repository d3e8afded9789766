#ifndef SEMAUTO_ERRORS_HPP
#define SEMAUTO_ERRORS_HPP

#include <stdexcept>
#include <string>

#include "semauto/types.hpp"

namespace semauto {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated precondition on an operation argument.
struct ContractViolation : Error {
  using Error::Error;
};

// Record-level or file-level parse failure that cannot be skipped.
struct ParseError : Error {
  using Error::Error;
};

// Persistence file has a wrong version header or is truncated.
struct FormatError : Error {
  using Error::Error;
};

// User has fewer than 2 rated items known to the knowledge graph; the
// caller is expected to skip the user and record the fact.
struct UserNotTrainable : Error {
  explicit UserNotTrainable(UserId user, std::size_t mapped_items)
      : Error("user " + std::to_string(user) + " not trainable: only " +
              std::to_string(mapped_items) + " rated item(s) found in the knowledge graph"),
        user_id(user),
        mapped_item_count(mapped_items) {}

  UserId user_id;
  std::size_t mapped_item_count;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace semauto

#endif  // SEMAUTO_ERRORS_HPP
