#pragma once

#include <stdexcept>

namespace swipt {

// Drive amplitude never exceeds the diode threshold, so the capacitor
// cannot charge.
struct NotConducting : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Steady-state search hit its horizon without settling.
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Candidate-sequence enumeration would exceed the configured budget.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace swipt
