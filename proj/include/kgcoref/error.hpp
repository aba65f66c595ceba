#pragma once

#include <stdexcept>
#include <string>

namespace kgcoref {

// Bad input: malformed files, out-of-range parameters, unknown ids.
// The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed result broke one of its own invariants. Exit code 2.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace kgcoref
