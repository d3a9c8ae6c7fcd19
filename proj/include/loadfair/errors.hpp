#pragma once

#include <stdexcept>
#include <string>

namespace loadfair {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input (bad JSON/CSV, unknown fields, wrong shapes).
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input violating an instance invariant
// (asymmetric matrix, beta > alpha, unknown group, ...).
struct ValidationError : Error {
    using Error::Error;
};

// No fair assignment exists for the request.
struct InfeasibleError : Error {
    using Error::Error;
};

// A solver hit a configured resource bound (pivots, nodes, guesses).
// Distinct from InfeasibleError: nothing was decided.
struct ResourceLimitError : Error {
    using Error::Error;
};

// A combinatorial cap was exceeded (oracle enumeration, exhaustive lists).
struct CapExceededError : Error {
    using Error::Error;
};

}  // namespace loadfair
