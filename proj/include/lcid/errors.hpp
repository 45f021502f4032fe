#pragma once

#include <stdexcept>
#include <string>

namespace lcid {

/// Rejected input: bad indices, parameter-space violations, unmet premises.
/// The CLI maps this to exit code 1.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure found data it cannot reconcile with the assumed
/// model (e.g. a moment grid that is not generated by the family).
/// The CLI maps this to exit code 2.
class NumericalDiagnostic : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lcid
