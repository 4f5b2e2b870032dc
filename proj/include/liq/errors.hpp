#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace liq {

/// Invalid user input or violated precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The explicit scheme produced a non-finite, out-of-bounds or
/// non-monotone layer. Carries the pseudo-time and node of the first failure.
class StabilityError : public std::runtime_error {
public:
    StabilityError(const std::string& what, double t, std::size_t node)
        : std::runtime_error(what + " (t=" + std::to_string(t) + ", node=" + std::to_string(node) +
                             "); reduce the time step h"),
          t_(t), node_(node) {}

    double time() const noexcept { return t_; }
    std::size_t node() const noexcept { return node_; }

private:
    double t_;
    std::size_t node_;
};

/// A convergence loop hit its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& loop, double rel_gap, double abs_gap)
        : std::runtime_error(loop + " loop exceeded its iteration cap (last relative gap " +
                             std::to_string(rel_gap) + ", last absolute gap " +
                             std::to_string(abs_gap) + ")"),
          loop_(loop), rel_gap_(rel_gap), abs_gap_(abs_gap) {}

    const std::string& loop() const noexcept { return loop_; }
    double rel_gap() const noexcept { return rel_gap_; }
    double abs_gap() const noexcept { return abs_gap_; }

private:
    std::string loop_;
    double rel_gap_;
    double abs_gap_;
};

}  // namespace liq
