#pragma once

#include "liq/errors.hpp"
#include "liq/model.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace liq {

/// Truncated formal expansion of the value function near the origin,
///
///   h_n(x) = x + sum_{i=1}^{n} k_i x^{1 + i/2},   k_1 = -(2/3) sqrt(2(a + b)).
///
/// The series has zero radius of convergence for generic (a, b); use
/// optimal_truncation() to pick how many terms to keep at a given x.
struct SeriesExpansion {
    double a = 0.0;
    double b = 0.0;
    std::vector<double> coeffs;  ///< k_1..k_n, coeffs[i-1] = k_i

    std::size_t order() const noexcept { return coeffs.size(); }
};

/// k_1..k_n from the coefficient recursion
///
///   3(m+3) k_1 k_{m+1} = k_m ((m+2)(2a - m) + 4b)
///                        - 1/2 sum_{j=1}^{m-1} (3+j)(m-j+3) k_{j+1} k_{m-j+1},
///
/// in any real type (extended precision for residual checks).
template <class Real>
std::vector<Real> recursion_coefficients(const Real& a, const Real& b, std::size_t n) {
    using std::sqrt;
    if (!(a + b > Real(0))) throw ValidationError("series needs a + b > 0");
    if (n == 0) throw ValidationError("series order must be at least 1");
    std::vector<Real> k(n);  // k[i-1] = k_i
    const Real k1 = -Real(2) / Real(3) * sqrt(Real(2) * (a + b));
    k[0] = k1;
    for (std::size_t m = 1; m < n; ++m) {
        const Real md(static_cast<double>(m));
        Real acc = k[m - 1] * ((md + Real(2)) * (Real(2) * a - md) + Real(4) * b);
        Real conv(0);
        for (std::size_t j = 1; j + 1 <= m; ++j) {
            const Real jd(static_cast<double>(j));
            conv += (Real(3) + jd) * (md - jd + Real(3)) * k[j] * k[m - j];
        }
        acc -= conv / Real(2);
        k[m] = acc / (Real(3) * (md + Real(3)) * k1);
    }
    return k;
}

inline SeriesExpansion series_coefficients(const ReducedParams& red, std::size_t n) {
    require_admissible(red);
    return {red.a, red.b, recursion_coefficients<double>(red.a, red.b, n)};
}

/// Value and first derivative of a truncated expansion.
template <class Real>
struct SeriesValue {
    Real u;
    Real du;
};

/// Evaluates u = x + sum k_i x^{1+i/2} and du = 1 + sum k_i (1+i/2) x^{i/2}
/// using the first `terms` coefficients (all when terms == 0 or exceeds the order).
/// Templated so residual checks can run in extended precision.
template <class Real = double>
SeriesValue<Real> series_eval(const SeriesExpansion& exp, const Real& x, std::size_t terms = 0) {
    using std::sqrt;
    if (x < Real(0)) throw ValidationError("series evaluation requires x >= 0");
    if (x == Real(0)) return {Real(0), Real(1)};
    const std::size_t n = (terms == 0 || terms > exp.order()) ? exp.order() : terms;
    const Real root = sqrt(x);
    Real sum_u(0);
    Real sum_du(0);
    Real pw = root;  // x^{i/2}
    for (std::size_t i = 1; i <= n; ++i) {
        const Real k(exp.coeffs[i - 1]);
        sum_u += k * pw;
        sum_du += k * (Real(1) + Real(static_cast<double>(i)) / Real(2)) * pw;
        pw *= root;
    }
    return {x + x * sum_u, Real(1) + sum_du};
}

/// 1 - h(x)/x evaluated without cancellation: -sum k_i x^{i/2}.
inline double series_shortfall(const SeriesExpansion& exp, double x, std::size_t terms = 0) {
    if (x <= 0.0) return 0.0;
    const std::size_t n = (terms == 0 || terms > exp.order()) ? exp.order() : terms;
    const double root = std::sqrt(x);
    double pw = root;
    double sum = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        sum += exp.coeffs[i - 1] * pw;
        pw *= root;
    }
    return -sum;
}

/// 1 - h'(x) evaluated without cancellation: -sum k_i (1+i/2) x^{i/2}.
inline double series_slope_deficit(const SeriesExpansion& exp, double x, std::size_t terms = 0) {
    if (x <= 0.0) return 0.0;
    const std::size_t n = (terms == 0 || terms > exp.order()) ? exp.order() : terms;
    const double root = std::sqrt(x);
    double pw = root;
    double sum = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        sum += exp.coeffs[i - 1] * (1.0 + 0.5 * static_cast<double>(i)) * pw;
        pw *= root;
    }
    return -sum;
}

/// Residual x^2 h'' - a x h' - b h + (h' - 1)^2 / 2 of h = x + sum k_i x^{1+i/2}.
template <class Real>
Real series_residual(const std::vector<Real>& k, const Real& a, const Real& b, const Real& x) {
    using std::sqrt;
    const Real root = sqrt(x);
    Real u = x;
    Real du(1);
    Real x2_ddu(0);
    Real pw = root;
    for (std::size_t i = 1; i <= k.size(); ++i) {
        const Real p = Real(1) + Real(static_cast<double>(i)) / Real(2);  // exponent of the term
        u += k[i - 1] * x * pw;
        du += k[i - 1] * p * pw;
        x2_ddu += k[i - 1] * p * (p - Real(1)) * x * pw;
        pw *= root;
    }
    return x2_ddu - a * x * du - b * u + (du - Real(1)) * (du - Real(1)) / Real(2);
}

/// Residual of the truncated expansion (first `terms` coefficients, all when 0).
template <class Real = double>
Real series_residual(const SeriesExpansion& exp, const Real& x, std::size_t terms = 0) {
    const std::size_t n = (terms == 0 || terms > exp.order()) ? exp.order() : terms;
    std::vector<Real> k;
    k.reserve(n);
    for (std::size_t i = 0; i < n; ++i) k.emplace_back(exp.coeffs[i]);
    return series_residual(k, Real(exp.a), Real(exp.b), x);
}

/// Number of leading terms to keep at x: the index of the smallest non-zero
/// term |k_m x^{1+m/2}| (largest index on ties). Equals n while all terms
/// still decrease.
inline std::size_t optimal_truncation(const SeriesExpansion& exp, double x) {
    if (!(x > 0.0)) throw ValidationError("optimal truncation requires x > 0");
    std::size_t best = 1;
    const double root = std::sqrt(x);
    double pw = x * root;
    double best_mag = std::abs(exp.coeffs[0]) * pw;
    for (std::size_t m = 2; m <= exp.order(); ++m) {
        pw *= root;
        const double k = exp.coeffs[m - 1];
        if (k == 0.0) continue;
        const double mag = std::abs(k) * pw;
        if (mag <= best_mag) {
            best_mag = mag;
            best = m;
        }
    }
    return best;
}

/// Constants describing the solution family near the origin.
struct SingularityConstants {
    double K1;     ///< 6a + 4b - 3
    double K2;     ///< 6a + 2b - 9
    double alpha;  ///< 2 - 2b/3
    double beta;   ///< sqrt(8(a + b))
};

inline SingularityConstants singularity_constants(const ReducedParams& red) {
    require_admissible(red);
    return {6.0 * red.a + 4.0 * red.b - 3.0, 6.0 * red.a + 2.0 * red.b - 9.0,
            2.0 - 2.0 * red.b / 3.0, std::sqrt(8.0 * (red.a + red.b))};
}

/// Exact three-term solution h(x) = x + k_1 x^{3/2} + k_2 x^2 of the ODE
/// with h(0) = 0, available only when K1 == 0 or K2 == 0.
///
/// This is one member of a continuum of solutions and is NOT the optimal
/// value function; it serves as a residual oracle for the ODE machinery.
struct SpecialSolution {
    SeriesExpansion series;  ///< order 2: {k_1, k_2}

    double value(double x) const { return series_eval(series, x).u; }
    double derivative(double x) const { return series_eval(series, x).du; }
};

inline std::optional<SpecialSolution> special_solution(const ReducedParams& red) {
    constexpr double kZeroTol = 1e-12;
    const auto c = singularity_constants(red);
    if (std::abs(c.K1) > kZeroTol && std::abs(c.K2) > kZeroTol) return std::nullopt;
    auto s = series_coefficients(red, 2);
    if (std::abs(c.K1) <= kZeroTol) s.coeffs[1] = 0.0;  // k_2 = K1/12
    return SpecialSolution{std::move(s)};
}

}  // namespace liq
