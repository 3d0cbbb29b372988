#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mbrb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent scenario or parameter set.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A guarantee was requested for parameters outside the proven region.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class SequenceReuse : public Error {
 public:
  using Error::Error;
};

class StateSpaceOverflow : public Error {
 public:
  StateSpaceOverflow(const std::string& what, std::uint64_t states, std::uint64_t terminals)
      : Error(what), states_explored(states), terminals_seen(terminals) {}

  std::uint64_t states_explored;
  std::uint64_t terminals_seen;
};

}  // namespace mbrb
