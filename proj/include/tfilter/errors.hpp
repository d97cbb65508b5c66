#pragma once

#include <stdexcept>
#include <string>

namespace tfilter {

// Malformed text input (automaton files, word files, command lines).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a semantic requirement: unknown label,
// non-increasing timestamp, N = 0, index out of range.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke an operation's precondition in a way that input validation
// cannot catch (e.g. projecting an empty zone).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace tfilter
