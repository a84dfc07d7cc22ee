#pragma once

#include <stdexcept>
#include <string>

namespace lsalloc {

// Base class for all errors thrown by this library. Everything derives from
// std::runtime_error so callers that don't care about the distinction can
// catch one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A constructor or operation precondition was violated (bad n, d, p, radius, ...).
struct InvalidParameter : Error {
    using Error::Error;
};

// A randomized graph generator exhausted its retry budget without producing
// a valid instance.
struct GenerationFailed : Error {
    using Error::Error;
};

// An operation that only makes sense for one graph family was called on
// another (e.g. coordinate-ball queries on a non-grid graph).
struct WrongFamily : Error {
    using Error::Error;
};

// A coupling was requested under a tie rule it is not defined for.
struct UnsupportedTieRule : Error {
    using Error::Error;
};

// Mismatched or malformed data passed to an analysis routine.
struct InvalidInput : Error {
    using Error::Error;
};

// A least-squares fit could not be computed (degenerate design matrix).
struct FitFailed : Error {
    using Error::Error;
};

// Experiment spec file could not be parsed; message includes position info.
struct ParseError : Error {
    using Error::Error;
};

// Experiment spec parsed but failed validation; message names the field.
struct ValidationError : Error {
    using Error::Error;
};

// Filesystem trouble (missing file, unwritable output directory, ...).
struct IoError : Error {
    using Error::Error;
};

} // namespace lsalloc
