#pragma once

#include "liq/errors.hpp"

#include <algorithm>
#include <cmath>

namespace liq {

/// Market-coordinate parameters of the liquidation problem. Rates are per
/// calendar year; eta is in price*year/share^2.
///
/// Construction validates sigma > 0, eta > 0 and the standing assumption
/// rho > lambda + r, so every live instance is usable by the solver.
class ModelParams {
public:
    ModelParams(double rho, double lambda, double r, double sigma, double eta)
        : rho_(rho), lambda_(lambda), r_(r), sigma_(sigma), eta_(eta) {
        if (!std::isfinite(rho) || !std::isfinite(lambda) || !std::isfinite(r) ||
            !std::isfinite(sigma) || !std::isfinite(eta))
            throw ValidationError("model parameters must be finite");
        if (!(sigma > 0.0)) throw ValidationError("sigma must be strictly positive");
        if (!(eta > 0.0)) throw ValidationError("eta must be strictly positive");
        if (!(rho > lambda + r))
            throw ValidationError("standing assumption rho > lambda + r violated (a + b <= 0)");
    }

    double rho() const noexcept { return rho_; }
    double lambda() const noexcept { return lambda_; }
    double r() const noexcept { return r_; }
    double sigma() const noexcept { return sigma_; }
    double eta() const noexcept { return eta_; }

private:
    double rho_;
    double lambda_;
    double r_;
    double sigma_;
    double eta_;
};

/// Coefficients (a, b) of the reduced ODE x^2 u'' = a x u' + b u - (u' - 1)^2 / 2.
template <class Real>
struct BasicReducedParams {
    Real a{};
    Real b{};
};

using ReducedParams = BasicReducedParams<double>;

/// Throws unless a + b > 0.
inline void require_admissible(const ReducedParams& p) {
    if (!std::isfinite(p.a) || !std::isfinite(p.b)) throw ValidationError("a and b must be finite");
    if (!(p.a + p.b > 0.0)) throw ValidationError("reduced parameters require a + b > 0");
}

/// Initial market state: unaffected price s > 0 and inventory z >= 0.
class MarketState {
public:
    MarketState(double s, double z) : s_(s), z_(z) {
        if (!std::isfinite(s) || !(s > 0.0)) throw ValidationError("price s must be positive");
        if (!std::isfinite(z) || !(z >= 0.0)) throw ValidationError("inventory z must be non-negative");
    }

    double s() const noexcept { return s_; }
    double z() const noexcept { return z_; }

private:
    double s_;
    double z_;
};

/// Dimension reduction over any field type (double, exact rationals, ...).
///   a = 2(lambda - r + sigma^2)/sigma^2,  b = -2(2 lambda - rho + sigma^2)/sigma^2
template <class Real>
BasicReducedParams<Real> reduce(const Real& rho, const Real& lambda, const Real& r, const Real& sigma) {
    const Real var = sigma * sigma;
    const Real two(2);
    return {two * (lambda - r + var) / var, -two * (two * lambda - rho + var) / var};
}

inline ReducedParams reduce(const ModelParams& p) {
    return reduce<double>(p.rho(), p.lambda(), p.r(), p.sigma());
}

/// Inverse of the reduction for rho, given sigma, lambda and r.
inline double rho_from_reduced(const ReducedParams& red, double lambda, double r, double sigma) {
    const double var = sigma * sigma;
    // a + b = 2(rho - lambda - r)/sigma^2
    return 0.5 * (red.a + red.b) * var + lambda + r;
}

/// rho > lambda^+ + r^+: purchases (v < 0) are admissible too. Informational only.
inline bool check_strong_admissibility(const ModelParams& p) {
    return p.rho() > std::max(p.lambda(), 0.0) + std::max(p.r(), 0.0);
}

/// Temporary impact coefficient from an observed block impact: a block of
/// one inventory unit sold over `window_minutes` moves the price by
/// `impact_fraction`.
inline double calibrate_eta(double impact_fraction, double price, double window_minutes,
                            double trading_minutes_per_year) {
    if (!(impact_fraction > 0.0) || !(price > 0.0) || !(window_minutes > 0.0) ||
        !(trading_minutes_per_year > 0.0))
        throw ValidationError("eta calibration inputs must be strictly positive");
    return impact_fraction * price * window_minutes / trading_minutes_per_year;
}

/// Trading minutes in a year of 250 eight-hour days.
inline constexpr double kTradingMinutesPerYear = 250.0 * 8.0 * 60.0;
/// Trading days per year used for reporting liquidation times.
inline constexpr double kTradingDaysPerYear = 250.0;

/// The three reference parametrizations (sigma = 0.2, eta = 7.5e-6).
inline ModelParams preset(int which) {
    switch (which) {
        case 1: return ModelParams(0.05, 0.0, 0.0, 0.2, 7.5e-6);
        case 2: return ModelParams(0.0, -0.1, 0.0, 0.2, 7.5e-6);
        case 3: return ModelParams(0.05, 0.03, 0.01, 0.2, 7.5e-6);
        default: throw ValidationError("preset must be 1, 2 or 3");
    }
}

}  // namespace liq
