#pragma once

#include <stdexcept>
#include <string>

namespace mac {

// Invalid grid, parameters, or run configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A thermodynamic function was evaluated outside its domain (e.g. rho <= 0).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fields living on different grids were combined.
class GridMismatch : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A structural invariant (mass, positivity, energy) was violated during a run.
// Maps to CLI exit code 4.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mac
