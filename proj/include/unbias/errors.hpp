#pragma once

#include <stdexcept>
#include <string>

namespace unbias {

// User-supplied configuration is invalid (bad field value, unknown key, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller broke an API precondition.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// A0 vanished numerically; Ratio(eps) cannot be formed.
struct SaturationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No inspection bit satisfies the intra-FHD threshold.
struct NoFeasibleBitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Overflow flags present while running in strict-overflow mode.
struct OverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace unbias
