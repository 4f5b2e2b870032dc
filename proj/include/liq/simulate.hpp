#pragma once

#include "liq/errors.hpp"
#include "liq/model.hpp"
#include "liq/profile.hpp"
#include "liq/solution.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace liq {

struct SimConfig {
    std::size_t n_paths = 10000;
    double dt = 1.0 / (250.0 * 8.0 * 60.0 * 12.0);  ///< years; five-second steps
    std::uint64_t seed = 1;
    double z_stop_rel = 1e-6;
    double t_max = 5.0;                             ///< years
    unsigned threads = 1;                           ///< 0 = hardware concurrency
    /// Normals summed per step. A run with dt and k substeps sees the same
    /// Brownian path as a run with dt/k and one substep (for coupled
    /// refinement checks).
    unsigned brownian_substeps = 1;
    double dt_hat = 1e-4;      ///< transformed problem: variance years per step
    double t_hat_max = 200.0;  ///< transformed problem: horizon cap, variance years
    std::size_t trajectory_paths = 0;   ///< dump the first k paths
    std::size_t trajectory_stride = 1;  ///< every m-th step of a dumped path

    void validate() const {
        if (n_paths < 1) throw ValidationError("n_paths must be at least 1");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
        if (!(z_stop_rel > 0.0) || !(z_stop_rel < 1e-2)) throw ValidationError("z_stop_rel must lie in (0, 1e-2)");
        if (!(t_max > 0.0)) throw ValidationError("t_max must be positive");
        if (brownian_substeps < 1) throw ValidationError("brownian_substeps must be at least 1");
        if (!(dt_hat > 0.0) || !(t_hat_max > 0.0)) throw ValidationError("dt_hat and t_hat_max must be positive");
        if (trajectory_stride < 1) throw ValidationError("trajectory_stride must be at least 1");
    }
};

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v;
        else comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Independent stream for one path, a pure function of (seed, path).
inline std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    return std::mt19937_64(seq);
}

/// Runs body(i) for i in [0, n) on `threads` workers (0 = hardware) in
/// contiguous blocks. Rethrows the first exception.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                const std::size_t lo = n * w / workers;
                const std::size_t hi = n * (w + 1) / workers;
                try {
                    for (std::size_t i = lo; i < hi; ++i) body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct PathResult {
    std::size_t id = 0;
    double T = 0.0;        ///< liquidation time, years (t_max when capped)
    double revenue = 0.0;  ///< discounted revenue
    bool capped = false;
};

struct TrajectoryPoint {
    std::size_t path_id;
    double t;
    double S;
    double Z;
    double v;
};

struct SimStats {
    std::size_t paths = 0;
    std::size_t completed = 0;
    std::size_t capped = 0;
    double mean_T_days = 0.0;
    double std_T_days = 0.0;
    double se_T_days = 0.0;
    double q05_T_days = 0.0;
    double q25_T_days = 0.0;
    double q50_T_days = 0.0;
    double q75_T_days = 0.0;
    double q95_T_days = 0.0;
    double mean_revenue = 0.0;
    double std_revenue = 0.0;
    double se_revenue = 0.0;
};

struct SimResult {
    SimStats stats;
    std::vector<PathResult> paths;
    std::vector<TrajectoryPoint> trajectory;
};

namespace detail {

/// Sample quantile with linear interpolation between order statistics.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
    double se = 0.0;
};

inline MeanStd mean_std(std::span<const double> v) {
    MeanStd out;
    if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
    CompensatedSum s;
    for (double x : v) s.add(x);
    out.mean = s.value() / static_cast<double>(v.size());
    if (v.size() < 2) return out;
    CompensatedSum ss;
    for (double x : v) ss.add((x - out.mean) * (x - out.mean));
    out.std = std::sqrt(ss.value() / static_cast<double>(v.size() - 1));
    out.se = out.std / std::sqrt(static_cast<double>(v.size()));
    return out;
}

/// Sum of `k` standard normals scaled back to unit variance.
inline double brownian_increment(std::mt19937_64& eng, std::normal_distribution<double>& normal, unsigned k) {
    if (k == 1) return normal(eng);
    double s = 0.0;
    for (unsigned i = 0; i < k; ++i) s += normal(eng);
    return s / std::sqrt(static_cast<double>(k));
}

}  // namespace detail

/// Aggregates per-path results in path order.
inline SimStats summarize(std::span<const PathResult> paths) {
    SimStats st;
    st.paths = paths.size();
    std::vector<double> T;
    std::vector<double> rev;
    T.reserve(paths.size());
    rev.reserve(paths.size());
    for (const auto& p : paths) {
        if (p.capped) {
            ++st.capped;
            continue;
        }
        T.push_back(p.T * kTradingDaysPerYear);
        rev.push_back(p.revenue);
    }
    st.completed = T.size();
    const auto t = detail::mean_std(T);
    const auto r = detail::mean_std(rev);
    st.mean_T_days = t.mean;
    st.std_T_days = t.std;
    st.se_T_days = t.se;
    st.mean_revenue = r.mean;
    st.std_revenue = r.std;
    st.se_revenue = r.se;
    std::sort(T.begin(), T.end());
    st.q05_T_days = detail::quantile_sorted(T, 0.05);
    st.q25_T_days = detail::quantile_sorted(T, 0.25);
    st.q50_T_days = detail::quantile_sorted(T, 0.50);
    st.q75_T_days = detail::quantile_sorted(T, 0.75);
    st.q95_T_days = detail::quantile_sorted(T, 0.95);
    return st;
}

/// Liquidation under the optimal rate v*(S, Z).
///
/// S follows the exact log-normal update, Z the explicit Euler step
/// dZ = (r Z - v*) dt. A step that would overshoot zero is shortened so the
/// remaining inventory is sold exactly. Revenue accrues e^{-rho t} (S - eta v) v dt.
/// A path ends when Z <= z_stop_rel z0 or at t_max (reported as capped).
inline SimResult simulate_liquidation(const SolutionProfile& profile, const ModelParams& params,
                                      const MarketState& state0, const SimConfig& cfg) {
    cfg.validate();
    require_consistent(profile, params);
    if (!(state0.z() > 0.0)) throw ValidationError("simulation needs z0 > 0");

    const double rho = params.rho();
    const double lam = params.lambda();
    const double r = params.r();
    const double sig = params.sigma();
    const double eta = params.eta();
    const double var = sig * sig;
    const double dt = cfg.dt;
    const double drift = (lam - 0.5 * var) * dt;
    const double vol = sig * std::sqrt(dt);
    const double z_stop = cfg.z_stop_rel * state0.z();
    const auto max_steps = static_cast<std::size_t>(std::ceil(cfg.t_max / dt - 1e-9));

    SimResult out;
    out.paths.resize(cfg.n_paths);
    const std::size_t dumped = std::min(cfg.trajectory_paths, cfg.n_paths);
    std::vector<std::vector<TrajectoryPoint>> traj(dumped);

    parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t id) {
        auto eng = path_engine(cfg.seed, id);
        std::normal_distribution<double> normal;
        double S = state0.s();
        double Z = state0.z();
        double t = 0.0;
        CompensatedSum revenue;
        PathResult res{id, 0.0, 0.0, false};
        std::vector<TrajectoryPoint>* dump = id < dumped ? &traj[id] : nullptr;
        for (std::size_t step = 0;; ++step) {
            const double v = S / (2.0 * eta) * profile.slope_deficit(eta * var * Z / S);
            if (dump && step % cfg.trajectory_stride == 0) dump->push_back({id, t, S, Z, v});
            if (step >= max_steps) {
                res.capped = true;
                res.T = t;
                break;
            }
            const double dZ = (r * Z - v) * dt;
            double tau = dt;
            if (Z + dZ <= 0.0) tau = Z / (v - r * Z);
            revenue.add(std::exp(-rho * t) * (S - eta * v) * v * tau);
            const double xi = detail::brownian_increment(eng, normal, cfg.brownian_substeps);
            if (tau < dt) {
                t += tau;
                res.T = t;
                if (dump) dump->push_back({id, t, S, 0.0, 0.0});
                break;
            }
            Z += dZ;
            S *= std::exp(drift + vol * xi);
            t = static_cast<double>(step + 1) * dt;
            if (Z <= z_stop) {
                res.T = t;
                if (dump) dump->push_back({id, t, S, Z, 0.0});
                break;
            }
        }
        res.revenue = revenue.value();
        out.paths[id] = res;
    });

    for (auto& d : traj) out.trajectory.insert(out.trajectory.end(), d.begin(), d.end());
    out.stats = summarize(out.paths);
    return out;
}

/// Monte Carlo estimate of u(x0) from the transformed control problem.
struct TransformedEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t paths = 0;
    std::size_t capped = 0;
};

/// Euler-Maruyama on dX = (c X - g) dt + X dW in variance-year time with
/// g = (1 - u'(X))/2 and c = (r - lambda - sigma^2)/sigma^2, accumulating
/// exp(-delta t) g (1 - g) dt with delta = (rho - 2 lambda - sigma^2)/sigma^2.
/// X is clamped at zero and a path stops once X <= z_stop_rel x0. Capped
/// paths contribute their accumulated payoff and are counted.
inline TransformedEstimate simulate_transformed(const SolutionProfile& profile, const ReducedParams& reduced,
                                                const ModelParams& params, double x0, const SimConfig& cfg) {
    cfg.validate();
    require_admissible(reduced);
    require_consistent(profile, params);
    const auto want = reduce(params);
    if (std::abs(want.a - reduced.a) > 1e-10 * std::max(1.0, std::abs(want.a)) ||
        std::abs(want.b - reduced.b) > 1e-10 * std::max(1.0, std::abs(want.b)))
        throw ValidationError("reduced parameters do not match the model parameters");
    if (!(x0 >= 0.0) || !std::isfinite(x0)) throw ValidationError("x0 must be non-negative");
    if (x0 == 0.0) return {0.0, 0.0, cfg.n_paths, 0};

    const double var = params.sigma() * params.sigma();
    const double c = (params.r() - params.lambda() - var) / var;
    const double delta = (params.rho() - 2.0 * params.lambda() - var) / var;
    const double dt = cfg.dt_hat;
    const double sq = std::sqrt(dt);
    const double stop = cfg.z_stop_rel * x0;
    const auto max_steps = static_cast<std::size_t>(std::ceil(cfg.t_hat_max / dt - 1e-9));

    std::vector<double> payoff(cfg.n_paths);
    std::vector<char> capped(cfg.n_paths, 0);
    parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t id) {
        auto eng = path_engine(cfg.seed, id);
        std::normal_distribution<double> normal;
        double X = x0;
        CompensatedSum acc;
        for (std::size_t step = 0;; ++step) {
            if (step >= max_steps) {
                capped[id] = 1;
                break;
            }
            const double t = static_cast<double>(step) * dt;
            const double g = 0.5 * profile.slope_deficit(X);
            const double xi = detail::brownian_increment(eng, normal, cfg.brownian_substeps);
            const double drift = c * X - g;
            const double next = X + drift * dt + X * sq * xi;
            double tau = dt;
            if (next <= 0.0 && drift < 0.0) tau = std::min(dt, X / -drift);
            acc.add(std::exp(-delta * t) * g * (1.0 - g) * tau);
            X = std::max(next, 0.0);
            if (X <= stop) break;
        }
        payoff[id] = acc.value();
    });

    TransformedEstimate est;
    est.paths = cfg.n_paths;
    for (char k : capped) est.capped += k ? 1 : 0;
    const auto ms = detail::mean_std(payoff);
    est.mean = ms.mean;
    est.se = ms.se;
    return est;
}

struct SqrtFit {
    double exponent = 0.0;
    double prefactor = 0.0;     ///< exp(intercept): I ~ prefactor z^exponent
    double max_residual = 0.0;  ///< max |log I - fit| over used nodes
    std::size_t used = 0;
    std::size_t dropped = 0;    ///< nodes with I below 1e-12
};

/// Least-squares line through (log z, log I(z)).
inline SqrtFit empirical_sqrt_fit(const SolutionProfile& profile, const ModelParams& params, double s,
                                  std::span<const double> z_grid) {
    if (z_grid.size() < 2) throw ValidationError("square-root fit needs at least two z values");
    std::vector<double> lx;
    std::vector<double> ly;
    SqrtFit fit;
    for (double z : z_grid) {
        const auto p = price_impact(profile, params, MarketState(s, z));
        if (!(p.I >= 1e-12)) {
            ++fit.dropped;
            continue;
        }
        lx.push_back(std::log(z));
        ly.push_back(std::log(p.I));
    }
    if (lx.size() < 2) throw ValidationError("square-root fit: fewer than two usable nodes");
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw ValidationError("square-root fit: z values must not all coincide");
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    fit.prefactor = std::exp(intercept);
    for (std::size_t i = 0; i < lx.size(); ++i)
        fit.max_residual = std::max(fit.max_residual, std::abs(ly[i] - (intercept + fit.exponent * lx[i])));
    fit.used = lx.size();
    return fit;
}

/// n log-spaced values from lo to hi inclusive.
inline std::vector<double> log_space(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ValidationError("log_space needs 0 < lo < hi and n >= 2");
    std::vector<double> out(n);
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
    out.back() = hi;
    return out;
}

}  // namespace liq
