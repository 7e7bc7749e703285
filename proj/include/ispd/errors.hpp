#ifndef ISPD_ERRORS_HPP
#define ISPD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ispd {

// Malformed or inconsistent user input (CSV, grid values, option combinations).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The optimizer failed to reach a usable optimum.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A requested configuration cannot be satisfied (correlation target too high,
// truncation leaves no probability mass, ...).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ispd

#endif
