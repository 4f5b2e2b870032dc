#pragma once

#include "liq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace liq {

namespace detail {

inline void require_knots(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("interpolation: knot and value sizes differ");
    if (x.size() < 2) throw ValidationError("interpolation: need at least two knots");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw ValidationError("interpolation: knots must be strictly increasing");
}

/// Index i with x[i] <= t < x[i+1], clamped to the first/last interval.
inline std::size_t locate(const std::vector<double>& x, double t) {
    if (t <= x.front()) return 0;
    if (t >= x.back()) return x.size() - 2;
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    return static_cast<std::size_t>(it - x.begin()) - 1;
}

}  // namespace detail

/// Natural cubic spline, used when moving solutions between meshes.
class CubicSpline {
public:
    CubicSpline(std::span<const double> x, std::span<const double> y)
        : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
        detail::require_knots(x, y);
        const std::size_t n = x_.size();
        if (n < 3) return;
        // Tridiagonal system for the second derivatives (Thomas algorithm).
        std::vector<double> c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1];
            const double h1 = x_[i + 1] - x_[i];
            const double diag = 2.0 * (h0 + h1);
            const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
            const double denom = diag - h0 * c[i - 1];
            c[i] = h1 / denom;
            d[i] = (rhs - h0 * d[i - 1]) / denom;
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = d[i] - c[i] * m_[i + 1];
            if (i == 1) break;
        }
    }

    double operator()(double t) const {
        const std::size_t i = detail::locate(x_, t);
        const double h = x_[i + 1] - x_[i];
        const double A = (x_[i + 1] - t) / h;
        const double B = (t - x_[i]) / h;
        return A * y_[i] + B * y_[i + 1] +
               ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
    }

    double derivative(double t) const {
        const std::size_t i = detail::locate(x_, t);
        const double h = x_[i + 1] - x_[i];
        const double A = (x_[i + 1] - t) / h;
        const double B = (t - x_[i]) / h;
        return (y_[i + 1] - y_[i]) / h +
               (-(3.0 * A * A - 1.0) * m_[i] + (3.0 * B * B - 1.0) * m_[i + 1]) * h / 6.0;
    }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives at knots
};

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Butland
/// harmonic-mean slopes). Monotone data yields a monotone interpolant.
class MonotoneCubic {
public:
    MonotoneCubic(std::span<const double> x, std::span<const double> y)
        : x_(x.begin(), x.end()), y_(y.begin(), y.end()), d_(x.size(), 0.0) {
        detail::require_knots(x, y);
        const std::size_t n = x_.size();
        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        if (n == 2) {
            d_[0] = d_[1] = delta[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d_[i] = 0.0;
                continue;
            }
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
        d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    double operator()(double t) const {
        const std::size_t i = detail::locate(x_, t);
        const double h = x_[i + 1] - x_[i];
        const double s = (t - x_[i]) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        return (2.0 * s3 - 3.0 * s2 + 1.0) * y_[i] + (s3 - 2.0 * s2 + s) * h * d_[i] +
               (-2.0 * s3 + 3.0 * s2) * y_[i + 1] + (s3 - s2) * h * d_[i + 1];
    }

    double derivative(double t) const {
        const std::size_t i = detail::locate(x_, t);
        const double h = x_[i + 1] - x_[i];
        const double s = (t - x_[i]) / h;
        const double s2 = s * s;
        return (6.0 * s2 - 6.0 * s) / h * y_[i] + (3.0 * s2 - 4.0 * s + 1.0) * d_[i] +
               (-6.0 * s2 + 6.0 * s) / h * y_[i + 1] + (3.0 * s2 - 2.0 * s) * d_[i + 1];
    }

    std::span<const double> knot_slopes() const noexcept { return d_; }

private:
    // One-sided three-point estimate, limited to keep shape.
    static double end_slope(double h0, double h1, double del0, double del1) {
        double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d * del0 <= 0.0) return 0.0;
        if (del0 * del1 <= 0.0 && std::abs(d) > std::abs(3.0 * del0)) return 3.0 * del0;
        return d;
    }

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> d_;
};

}  // namespace liq
