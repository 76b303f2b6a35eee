#pragma once

#include <stdexcept>

namespace adviser {

// Malformed or unknown input (bad ids, non-finite features, schema problems).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inconsistent configuration (threshold above budget, unknown method, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// Exhaustive search refused because the instance is too large.
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An instance or allocation broke a domain rule.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace adviser
