#pragma once

#include "liq/errors.hpp"
#include "liq/model.hpp"
#include "liq/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace liq {

/// Throws unless the profile was solved for reduce(params).
inline void require_consistent(const SolutionProfile& profile, const ModelParams& params, double tol = 1e-10) {
    const auto want = reduce(params);
    const auto have = profile.reduced();
    auto close = [tol](double x, double y) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(y)); };
    if (!close(have.a, want.a) || !close(have.b, want.b))
        throw ValidationError("profile (a=" + std::to_string(have.a) + ", b=" + std::to_string(have.b) +
                              ") does not match the model parameters (a=" + std::to_string(want.a) +
                              ", b=" + std::to_string(want.b) + ")");
}

/// Reduced state eta sigma^2 z / s.
inline double reduced_state(const ModelParams& params, const MarketState& state) {
    return params.eta() * params.sigma() * params.sigma() * state.z() / state.s();
}

/// V(s, z) = s^2 u(chi) / (eta sigma^2), chi = eta sigma^2 z / s.
///
/// Evaluated as s z (1 - u(chi)/chi), which is the same quantity but keeps
/// full precision when chi is tiny.
inline double value_function(const SolutionProfile& profile, const ModelParams& params, const MarketState& state) {
    require_consistent(profile, params);
    if (state.z() == 0.0) return 0.0;
    const double chi = reduced_state(params, state);
    return state.s() * state.z() * (1.0 - profile.shortfall(chi));
}

/// Optimal selling rate v* = s/(2 eta) (1 - u'(chi)), in shares per year.
inline double optimal_rate(const SolutionProfile& profile, const ModelParams& params, const MarketState& state) {
    require_consistent(profile, params);
    if (state.z() == 0.0) return 0.0;
    return state.s() / (2.0 * params.eta()) * profile.slope_deficit(reduced_state(params, state));
}

struct ImpactPoint {
    double z = 0.0;
    double s = 0.0;
    double x_display = 0.0;  ///< eta z / s
    double chi = 0.0;        ///< sigma^2 x_display
    double I = 0.0;          ///< per-share impact fraction 1 - u(chi)/chi
    double tau = 0.0;        ///< 2 x_display / (1 - u'(chi)), years
};

inline ImpactPoint price_impact(const SolutionProfile& profile, const ModelParams& params, const MarketState& state) {
    require_consistent(profile, params);
    if (!(state.z() > 0.0)) throw ValidationError("price impact needs z > 0");
    ImpactPoint p;
    p.z = state.z();
    p.s = state.s();
    p.x_display = params.eta() * state.z() / state.s();
    p.chi = params.sigma() * params.sigma() * p.x_display;
    p.I = profile.shortfall(p.chi);
    const double deficit = profile.slope_deficit(p.chi);
    p.tau = deficit > 0.0 ? 2.0 * p.x_display / deficit : std::numeric_limits<double>::infinity();
    return p;
}

/// Leading-order small-trade impact (4/3) sqrt(eta (rho - lambda - r) z / s).
inline double impact_leading_order(const ModelParams& params, const MarketState& state) {
    return 4.0 / 3.0 * std::sqrt(params.eta() * (params.rho() - params.lambda() - params.r()) * state.z() / state.s());
}

/// Relative jump |spline - series| / |series| at the series switch point.
inline double handoff_mismatch(const SolutionProfile& profile) {
    const double xs = profile.x_switch();
    const auto& series = profile.series();
    const double from_series = series_eval(series, xs, optimal_truncation(series, xs)).u;
    return std::abs(profile.value(xs) - from_series) / std::abs(from_series);
}

/// Largest |raw interpolant slope - clamped slope| over the grid nodes at or
/// above the switch point; values beyond 1e-3 mean the grid data is
/// contaminated.
inline double slope_clamp_excess(const SolutionProfile& profile) {
    double worst = 0.0;
    for (double x : profile.nodes()) {
        if (x < profile.x_switch() || x > profile.L()) continue;
        const double raw = profile.raw_grid_slope(x);
        worst = std::max(worst, std::abs(raw - std::clamp(raw, 0.0, 1.0)));
    }
    return worst;
}

/// Shape of sampled data, read off the sign pattern of second divided
/// differences.
enum class CurveShape {
    Constant,
    Linear,  ///< all second differences within tolerance of zero; not one of the five alternatives
    Concave,
    Convex,
    ConcaveThenConvex,
    ConvexThenConcave,
};

inline const char* to_string(CurveShape s) {
    switch (s) {
        case CurveShape::Constant: return "constant";
        case CurveShape::Linear: return "linear";
        case CurveShape::Concave: return "concave";
        case CurveShape::Convex: return "convex";
        case CurveShape::ConcaveThenConvex: return "concave-then-convex";
        case CurveShape::ConvexThenConcave: return "convex-then-concave";
    }
    return "unknown";
}

class ClassificationError : public std::runtime_error {
public:
    ClassificationError(const std::string& what, std::size_t sign_changes)
        : std::runtime_error(what), sign_changes_(sign_changes) {}
    std::size_t sign_changes() const noexcept { return sign_changes_; }

private:
    std::size_t sign_changes_;
};

/// Second divided differences 2 [y_{j-1}, y_j, y_{j+1}] at interior nodes.
inline std::vector<double> second_differences(std::span<const double> x, std::span<const double> y) {
    detail::require_knots(x, y);
    std::vector<double> out;
    out.reserve(x.size() > 2 ? x.size() - 2 : 0);
    for (std::size_t j = 1; j + 1 < x.size(); ++j) {
        const double left = (y[j] - y[j - 1]) / (x[j] - x[j - 1]);
        const double right = (y[j + 1] - y[j]) / (x[j + 1] - x[j]);
        out.push_back(2.0 * (right - left) / (x[j + 1] - x[j - 1]));
    }
    return out;
}

/// Classifies by the signs of second divided differences; entries with
/// magnitude <= tol carry no sign. Throws ClassificationError for more than
/// one sign change.
inline CurveShape classify_curve(std::span<const double> x, std::span<const double> y, double tol = 1e-8) {
    if (x.size() < 4) throw ValidationError("curve classification needs at least four nodes");
    const auto dd = second_differences(x, y);
    std::vector<int> runs;
    for (double d : dd) {
        const int sign = d > tol ? 1 : (d < -tol ? -1 : 0);
        if (sign != 0 && (runs.empty() || runs.back() != sign)) runs.push_back(sign);
    }
    if (runs.empty()) {
        for (double v : y)
            if (std::abs(v - y[0]) > tol) return CurveShape::Linear;
        return CurveShape::Constant;
    }
    if (runs.size() == 1) return runs[0] < 0 ? CurveShape::Concave : CurveShape::Convex;
    if (runs.size() == 2) return runs[0] < 0 ? CurveShape::ConcaveThenConvex : CurveShape::ConvexThenConcave;
    throw ClassificationError("ambiguous curvature: " + std::to_string(runs.size() - 1) +
                                  " sign changes in second differences (numerical contamination)",
                              runs.size() - 1);
}

inline CurveShape classify_curve(const SolutionProfile& profile, double tol = 1e-8) {
    return classify_curve(profile.nodes(), profile.values(), tol);
}

}  // namespace liq
