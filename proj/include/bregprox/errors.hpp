#pragma once

#include <stdexcept>
#include <string>

namespace bregprox {

// Caller broke an API precondition (mismatched tangent bases, non-symmetric
// input to a symmetric routine, malformed state).
class contract_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Input left the mathematical domain of an operation (non-positive orthant
// coordinate, non-SPD matrix, point outside a Bregman zone or feasible set).
class domain_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid solver or experiment parameter.
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or unresolvable experiment configuration.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bregprox
