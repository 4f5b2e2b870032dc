#pragma once

#include "liq/asymptotics.hpp"
#include "liq/errors.hpp"
#include "liq/interpolation.hpp"
#include "liq/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace liq {

/// Provenance of a converged profile.
struct ProfileMetadata {
    double a = 0.0;
    double b = 0.0;
    double L = 0.0;
    std::size_t N = 0;
    double T = 0.0;    ///< pseudo-time of the returned layer
    double h = 0.0;    ///< time step used
    double gap = 0.0;  ///< sup(upper run - lower run) at T

    ReducedParams reduced() const noexcept { return {a, b}; }
};

/// Discrete approximation of the stationary value function u on [0, inf).
///
/// Evaluation stitches three pieces: the optimally truncated near-zero
/// series below x_switch, a monotone cubic through the grid values on
/// [x_switch, L], and the constant u(L) with zero slope beyond L (the
/// Neumann condition held at the truncation point).
class SolutionProfile {
public:
    SolutionProfile(std::vector<double> x, std::vector<double> u, ProfileMetadata meta, double x_switch = 1e-3,
                    std::size_t series_order = 6)
        : x_(std::move(x)), u_(std::move(u)), meta_(meta), x_switch_(x_switch),
          series_(series_coefficients(meta.reduced(), series_order)), interp_(x_, u_) {
        if (x_.size() < 3) throw ValidationError("profile needs at least three nodes");
        if (x_.front() != 0.0) throw ValidationError("profile grid must start at x = 0");
        if (u_.front() != 0.0) throw ValidationError("profile must satisfy u(0) = 0");
        if (!(x_switch_ > 0.0)) throw ValidationError("series switch point must be positive");
        for (std::size_t j = 0; j < x_.size(); ++j)
            if (!std::isfinite(u_[j]) || u_[j] < -1e-9 || u_[j] > x_[j] + 1e-9)
                throw ValidationError("profile values must satisfy 0 <= u <= x");
    }

    struct Value {
        double u;
        double du;
    };

    Value eval(double x) const {
        if (!(x >= 0.0)) throw ValidationError("profile evaluation requires x >= 0");
        if (x == 0.0) return {0.0, 1.0};
        if (x < x_switch_) {
            const auto v = series_eval(series_, x, optimal_truncation(series_, x));
            return {v.u, std::clamp(v.du, 0.0, 1.0)};
        }
        if (x > meta_.L) return {u_.back(), 0.0};
        return {interp_(x), std::clamp(interp_.derivative(x), 0.0, 1.0)};
    }

    double value(double x) const { return eval(x).u; }
    double slope(double x) const { return eval(x).du; }

    /// 1 - u(x)/x, computed without cancellation on the series branch.
    double shortfall(double x) const {
        if (!(x >= 0.0)) throw ValidationError("profile evaluation requires x >= 0");
        if (x == 0.0) return 0.0;
        if (x < x_switch_) return std::clamp(series_shortfall(series_, x, optimal_truncation(series_, x)), 0.0, 1.0);
        return std::clamp(1.0 - value(x) / x, 0.0, 1.0);
    }

    /// 1 - u'(x) in [0, 1], computed without cancellation on the series branch.
    double slope_deficit(double x) const {
        if (!(x >= 0.0)) throw ValidationError("profile evaluation requires x >= 0");
        if (x == 0.0) return 0.0;
        if (x < x_switch_)
            return std::clamp(series_slope_deficit(series_, x, optimal_truncation(series_, x)), 0.0, 1.0);
        return 1.0 - slope(x);
    }

    /// Raw interpolant derivative before clamping (contamination diagnostics).
    double raw_grid_slope(double x) const { return interp_.derivative(x); }

    std::span<const double> nodes() const noexcept { return x_; }
    std::span<const double> values() const noexcept { return u_; }
    const ProfileMetadata& metadata() const noexcept { return meta_; }
    ReducedParams reduced() const noexcept { return meta_.reduced(); }
    double L() const noexcept { return meta_.L; }
    double x_switch() const noexcept { return x_switch_; }
    double error_certificate() const noexcept { return meta_.gap; }
    const SeriesExpansion& series() const noexcept { return series_; }

private:
    std::vector<double> x_;
    std::vector<double> u_;
    ProfileMetadata meta_;
    double x_switch_;
    SeriesExpansion series_;
    MonotoneCubic interp_;
};

}  // namespace liq
