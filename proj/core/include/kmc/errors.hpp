#pragma once

#include <stdexcept>
#include <string>

namespace kmc {

// Bad argument to a numerical routine.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Invalid scene, mesh, or run configuration. CLI exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values, non-convergence. CLI exit code 2.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace kmc
