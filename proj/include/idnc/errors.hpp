#pragma once

#include <stdexcept>
#include <string>

namespace idnc {

// Raised when a caller breaks an operation's precondition on session state,
// e.g. reporting feedback for a packet the receiver already holds.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Exact enumeration refused because the instance exceeds its budget.
// Callers are expected to fall back to a heuristic.
class OracleUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace idnc

namespace idnc {

// A combinatorial enumeration (e.g. RLNC policies) is larger than allowed.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace idnc
