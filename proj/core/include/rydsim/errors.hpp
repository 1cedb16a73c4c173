#pragma once

#include <stdexcept>
#include <string>

namespace rydsim {

// Bad or inconsistent run configuration (unknown preset, malformed file,
// incompatible model/initial-state combination). CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problem size exceeds a hard resource guard (e.g. 2^N state vector).
// CLI exit code 4.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An integration run left its validity envelope (norm drift, boundary
// occupancy) and was stopped. CLI exit code 3.
struct NumericalAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rydsim
