#pragma once

#include <stdexcept>
#include <string>

namespace ahpa {

/// Input violates a documented invariant (bad file, bad fleet, bad query).
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Instance exceeds a hard enumeration limit of the exact solvers.
class CapExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace ahpa
