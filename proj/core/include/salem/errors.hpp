#pragma once

#include <stdexcept>
#include <string>

namespace salem {

// Bad user-facing parameters (ratio out of range, malformed interval, ...).
struct InvalidSpec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Request exceeds a hard resource ceiling (exhaustive enumeration too large, ...).
struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameters outside the mathematical validity regime of an estimate.
struct OutOfRegime : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace salem
