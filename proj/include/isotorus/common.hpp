#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace isotorus {

inline constexpr double pi = std::numbers::pi_v<double>;

// Bad input: malformed geometry, out-of-range arguments, budget overruns
// detected before any heavy work.  CLI maps this to exit code 2.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A computation started from valid input but failed to reach its target
// (divergent iteration, loss of positivity, ill-conditioned solve).
// CLI maps this to exit code 3.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative solver gave up; carries the last residual norm for diagnostics.
struct convergence_error : numerical_error {
    double residual;
    convergence_error(const std::string& what, double res)
        : numerical_error(what + " (last residual " + std::to_string(res) + ")"),
          residual(res) {}
};

// Compensated (Kahan) accumulator.  Used wherever a long sum feeds a
// quantity that later gets square-rooted or differenced.
class kahan_sum {
    double sum_ = 0.0, carry_ = 0.0;
public:
    void add(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_; }
};

inline double sq(double x) { return x * x; }

} // namespace isotorus
