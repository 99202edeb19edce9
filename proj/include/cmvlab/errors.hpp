#pragma once

#include <stdexcept>
#include <string>

namespace cmvlab {

/// Invalid arguments: empty intervals, malformed literals, out-of-range knobs.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A value outside its mathematical domain (e.g. a Verblunsky coefficient with |α| ≥ 1).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The spectral parameter hit (numerically) an eigenvalue of the block being inverted.
class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative or factorization routine could not meet its accuracy contract.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cmvlab
