#pragma once

#include <stdexcept>
#include <string>

namespace lotka {

// Malformed input, bad arguments, violated preconditions on data.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric procedure could not produce a meaningful answer
// (too few points, zero variance, likelihood maximised at a bracket edge).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lotka
