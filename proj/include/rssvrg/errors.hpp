#pragma once

#include <stdexcept>

namespace rssvrg {

/// Invalid caller input or configuration (dimension mismatch, index out of
/// range, non-positive step, empty batch, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver produced a non-finite iterate or objective value.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rssvrg
