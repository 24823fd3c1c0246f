#pragma once

#include <stdexcept>
#include <string>

namespace agsyn {

/// Malformed or out-of-contract input (bad symbol, alphabet mismatch, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// No plan exists for the given inputs; `what()` names the witness.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The learner observed an answer that contradicts an earlier one.
class LearnerFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace agsyn
