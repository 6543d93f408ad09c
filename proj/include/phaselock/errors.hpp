#pragma once

#include <stdexcept>
#include <string>

namespace phaselock {

/// Parameter outside the domain of an operation (maps to CLI exit code 2).
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure: step-size underflow, step budget exhausted, or an
/// accuracy gate that did not hold (maps to CLI exit code 3).
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class integration_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

class accuracy_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

/// File could not be written (maps to CLI exit code 1).
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw domain_error(what);
}

}  // namespace detail

}  // namespace phaselock
