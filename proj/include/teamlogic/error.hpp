// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLOGIC_ERROR_HPP
#define TEAMLOGIC_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace teamlogic {

/// Malformed formula text. `position` is a byte offset into the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Invalid arguments to a library operation (unbound variable, bad arity, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A sentence outside the ∃*∀* prefix class was given to the EA procedure.
class NotEA : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The exponential search would exceed a configured ceiling.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace teamlogic

#endif  // TEAMLOGIC_ERROR_HPP
