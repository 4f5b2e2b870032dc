#pragma once

#include "liq/errors.hpp"
#include "liq/interpolation.hpp"
#include "liq/model.hpp"
#include "liq/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace liq {

/// Grid mapping x(xi) = e^xi - 1 - xi + xi^{3/2}; clusters nodes at the origin
/// where the solution behaves like x - c x^{3/2}.
inline double grid_map(double xi) { return std::expm1(xi) - xi + xi * std::sqrt(xi); }

/// Non-equidistant nodes x_0 = 0 < ... < x_N = L, equidistant in xi.
struct SpatialGrid {
    std::size_t N = 0;
    double L = 0.0;
    std::vector<double> xi;
    std::vector<double> x;
};

/// Solves grid_map(xi) = L by bisection to 1e-12 in xi.
inline double grid_endpoint(double L) {
    if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("grid length L must be positive");
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; grid_map(hi) < L; ++i) {
        if (i > 200) throw ValidationError("grid endpoint root bracket not found");
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 400 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        (grid_map(mid) < L ? lo : hi) = mid;
    }
    if (hi - lo > 1e-12) throw ValidationError("grid endpoint bisection did not converge");
    return 0.5 * (lo + hi);
}

inline SpatialGrid build_grid(std::size_t N, double L) {
    if (N < 2) throw ValidationError("grid needs N >= 2");
    const double xi_end = grid_endpoint(L);
    SpatialGrid g{N, L, std::vector<double>(N + 1), std::vector<double>(N + 1)};
    for (std::size_t j = 0; j <= N; ++j) {
        g.xi[j] = xi_end * static_cast<double>(j) / static_cast<double>(N);
        g.x[j] = grid_map(g.xi[j]);
    }
    g.xi[N] = xi_end;
    g.x[0] = 0.0;
    g.x[N] = L;  // pin the endpoint; the mapped value agrees to ~1e-11
    return g;
}

/// Tridiagonal discretisation of x^2 D^2 - a x D - b on rows 1..N-1
/// (central differences on the non-uniform mesh). Entries at rows 0 and N
/// are unused.
struct DiscreteOperator {
    std::vector<double> lower;  ///< A_{j,j-1}
    std::vector<double> diag;   ///< A_{j,j}
    std::vector<double> upper;  ///< A_{j,j+1}
};

inline DiscreteOperator assemble(const SpatialGrid& grid, const ReducedParams& red) {
    const auto& x = grid.x;
    const std::size_t n = x.size();
    DiscreteOperator op{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                        std::vector<double>(n, 0.0)};
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double span = x[j + 1] - x[j - 1];
        const double dl = x[j] - x[j - 1];
        const double du = x[j + 1] - x[j];
        const double diff = 2.0 * x[j] * x[j];
        const double adv = red.a * x[j] / span;
        op.lower[j] = diff / (span * dl) + adv;
        op.diag[j] = -diff / span * (1.0 / du + 1.0 / dl) - red.b;
        op.upper[j] = diff / (span * du) - adv;
    }
    return op;
}

/// (A w)_j for interior rows; zero at the boundary rows.
inline std::vector<double> apply(const DiscreteOperator& op, std::span<const double> w) {
    std::vector<double> out(w.size(), 0.0);
    for (std::size_t j = 1; j + 1 < w.size(); ++j)
        out[j] = op.lower[j] * w[j - 1] + op.diag[j] * w[j] + op.upper[j] * w[j + 1];
    return out;
}

/// Which side of the stationary solution a run starts from.
enum class InitialCondition { Lower, Upper };

enum class MonotoneCheck { None, NonDecreasing, NonIncreasing };

/// What to do when a run checked for monotonicity moves the wrong way.
enum class MonotonePolicy { Record, Throw };

/// Largest wrong-way move seen by a monotonicity-checked run.
struct MonotoneViolation {
    double amount = 0.0;  ///< per-step move against the expected direction
    double t = 0.0;
    std::size_t node = 0;
};

struct TimeMarchState {
    std::vector<double> layer;  ///< w_{i,0..N}
    double t = 0.0;
    double h = 0.0;
    std::size_t steps = 0;
    MonotoneViolation worst;  ///< only filled for checked runs
};

namespace detail {

inline constexpr double kMonotoneTol = 1e-9;

inline std::vector<double> inverse_spans(const SpatialGrid& grid) {
    const auto& x = grid.x;
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t j = 1; j + 1 < x.size(); ++j) out[j] = 1.0 / (x[j + 1] - x[j - 1]);
    return out;
}

/// One explicit Euler step of w_t = A w + F(w) on rows 1..N-1, followed by
/// w_0 = 0 and w_N = w_{N-1}. Writes into `next`.
///
/// Throws StabilityError when a value is non-finite or leaves [-x_j, 2 x_j]
/// (i.e. the iteration is blowing up). Moves against `check` are recorded in
/// `worst`, and thrown only under MonotonePolicy::Throw.
inline void euler_step(const SpatialGrid& grid, const DiscreteOperator& op, std::span<const double> inv_span,
                       std::span<const double> w, std::span<double> next, double h, double t,
                       MonotoneCheck check, MonotonePolicy policy, MonotoneViolation& worst) {
    const double* x = grid.x.data();
    const double* lo = op.lower.data();
    const double* di = op.diag.data();
    const double* up = op.upper.data();
    const double* is = inv_span.data();
    const double* src = w.data();
    double* dst = next.data();
    const std::size_t n = w.size();
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double slope = (src[j + 1] - src[j - 1]) * is[j] - 1.0;
        dst[j] = src[j] + h * (lo[j] * src[j - 1] + di[j] * src[j] + up[j] * src[j + 1] + 0.5 * slope * slope);
    }
    bool bad = false;
    for (std::size_t j = 1; j + 1 < n; ++j) bad |= !(dst[j] >= -x[j] && dst[j] <= 2.0 * x[j]);
    if (bad) {
        for (std::size_t j = 1; j + 1 < n; ++j) {
            if (!std::isfinite(dst[j])) throw StabilityError("non-finite value in explicit step", t + h, j);
            if (!(dst[j] >= -x[j] && dst[j] <= 2.0 * x[j]))
                throw StabilityError("explicit step is blowing up", t + h, j);
        }
    }
    dst[0] = 0.0;
    dst[n - 1] = dst[n - 2];
    if (check == MonotoneCheck::None) return;
    const double sign = check == MonotoneCheck::NonDecreasing ? 1.0 : -1.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double wrong = sign * (src[j] - dst[j]);
        if (wrong > worst.amount) worst = {wrong, t + h, j};
    }
    if (policy == MonotonePolicy::Throw && worst.amount > kMonotoneTol)
        throw StabilityError(check == MonotoneCheck::NonDecreasing ? "lower run decreased in time"
                                                                   : "upper run increased in time",
                             worst.t, worst.node);
}

}  // namespace detail

/// Advances one time step. Throws StabilityError on a non-finite or
/// out-of-band value.
inline TimeMarchState step(const TimeMarchState& state, const DiscreteOperator& op, const SpatialGrid& grid) {
    if (state.layer.size() != grid.x.size()) throw ValidationError("layer size does not match grid");
    TimeMarchState out = state;
    MonotoneViolation unused;
    detail::euler_step(grid, op, detail::inverse_spans(grid), state.layer, out.layer, state.h, state.t,
                       MonotoneCheck::None, MonotonePolicy::Record, unused);
    out.t = state.t + state.h;
    ++out.steps;
    return out;
}

/// Incremental time marcher reused by evolve() and the convergence loops.
class TimeMarcher {
public:
    TimeMarcher(const SpatialGrid& grid, const DiscreteOperator& op, std::vector<double> init, double h,
                MonotoneCheck check = MonotoneCheck::None, MonotonePolicy policy = MonotonePolicy::Record)
        : grid_(&grid), op_(&op), check_(check), policy_(policy), inv_span_(detail::inverse_spans(grid)),
          scratch_(init.size()) {
        if (!(h > 0.0)) throw ValidationError("time step h must be positive");
        if (init.size() != grid.x.size()) throw ValidationError("initial layer size does not match grid");
        state_.layer = std::move(init);
        state_.h = h;
    }

    /// Steps until t >= T (M = ceil(T/h) steps in total).
    void advance_to(double T) {
        const auto target = static_cast<std::size_t>(std::ceil(T / state_.h - 1e-9));
        while (state_.steps < target) {
            detail::euler_step(*grid_, *op_, inv_span_, state_.layer, scratch_, state_.h, state_.t, check_,
                               policy_, state_.worst);
            state_.layer.swap(scratch_);
            ++state_.steps;
            state_.t = static_cast<double>(state_.steps) * state_.h;
        }
    }

    const TimeMarchState& state() const noexcept { return state_; }
    const std::vector<double>& layer() const noexcept { return state_.layer; }

private:
    const SpatialGrid* grid_;
    const DiscreteOperator* op_;
    MonotoneCheck check_;
    MonotonePolicy policy_;
    std::vector<double> inv_span_;
    TimeMarchState state_;
    std::vector<double> scratch_;
};

inline std::vector<double> initial_layer(const SpatialGrid& grid, InitialCondition init) {
    return init == InitialCondition::Lower ? std::vector<double>(grid.x.size(), 0.0) : grid.x;
}

/// Runs ceil(T/h) explicit steps from w = 0 (lower) or w = x (upper). The
/// lower run should be non-decreasing and the upper run non-increasing in
/// time at every node; the largest violation is returned in `worst`, or
/// thrown as a StabilityError under MonotonePolicy::Throw.
inline TimeMarchState evolve(const SpatialGrid& grid, const DiscreteOperator& op, InitialCondition init,
                             double h, double T, MonotonePolicy policy = MonotonePolicy::Record) {
    if (!(h > 0.0) || !(T >= h)) throw ValidationError("evolve requires h > 0 and T >= h");
    TimeMarcher m(grid, op, initial_layer(grid, init), h,
                  init == InitialCondition::Lower ? MonotoneCheck::NonDecreasing : MonotoneCheck::NonIncreasing,
                  policy);
    m.advance_to(T);
    return m.state();
}

/// Relative implementation shortfall f_j = 1 - w_j / x_j, with f_0 = 0.
inline std::vector<double> shortfall_profile(std::span<const double> layer, const SpatialGrid& grid) {
    if (layer.size() != grid.x.size()) throw ValidationError("layer size does not match grid");
    std::vector<double> f(layer.size(), 0.0);
    for (std::size_t j = 1; j < layer.size(); ++j) f[j] = std::clamp(1.0 - layer[j] / grid.x[j], 0.0, 1.0);
    return f;
}

/// Tolerances, starting points and caps of the nested convergence loops.
struct SolverConfig {
    double rel_tol = 0.1;
    double abs_tol = 1e-4;
    double shortfall_split = 0.01;
    double T_start = 0.1;
    double T_step = 0.1;
    std::size_t N_start = 10;
    std::size_t N_step = 10;
    double L_start = 1.0;
    double L_step = 0.1;
    double h_start = 1e-5;
    std::size_t T_cap = 10000;
    std::size_t N_cap = 1000;
    std::size_t L_cap = 1000;
    std::size_t h_cap = 20;
    double x_switch = 1e-3;
    std::size_t series_order = 6;
    /// Optional progress sink; receives one line per finished N-loop.
    std::function<void(const std::string&)> progress;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(shortfall_split > 0.0) || !(T_start > 0.0) ||
            !(T_step > 0.0) || !(L_start > 0.0) || !(L_step > 0.0) || !(h_start > 0.0) || !(x_switch > 0.0))
            throw ValidationError("solver tolerances and steps must be positive");
        if (N_start < 2 || N_step == 0 || T_cap == 0 || N_cap == 0 || L_cap == 0 || h_cap == 0 ||
            series_order == 0)
            throw ValidationError("solver counts and caps must be positive");
    }
};

/// Both halves of the stopping rule, evaluated on x in (0, 1].
struct StopGaps {
    double rel = 0.0;  ///< sup |1 - f2/f1| where f2 <= split
    double abs = 0.0;  ///< sup |f2 - f1| on the rest of [0, 1]

    bool met(const SolverConfig& cfg) const { return rel <= cfg.rel_tol && abs <= cfg.abs_tol; }
};

/// Compares two shortfall profiles sampled at the same nodes `x`.
inline StopGaps stop_gaps(std::span<const double> x, std::span<const double> f1, std::span<const double> f2,
                          double split) {
    StopGaps g;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] > 1.0) break;
        if (!(x[j] > 0.0)) continue;
        if (f2[j] <= split) {
            double r;
            if (f1[j] != 0.0) r = std::abs(1.0 - f2[j] / f1[j]);
            else r = f2[j] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            g.rel = std::max(g.rel, r);
        } else {
            g.abs = std::max(g.abs, std::abs(f2[j] - f1[j]));
        }
    }
    return g;
}

/// Resamples `values` given on `from` onto `to` by cubic spline. Beyond the
/// end of `from` the last value is held constant. Clamped to 0 <= w <= x.
inline std::vector<double> transfer(const SpatialGrid& from, std::span<const double> values, const SpatialGrid& to) {
    const CubicSpline spline(from.x, values);
    std::vector<double> out(to.x.size());
    for (std::size_t j = 0; j < to.x.size(); ++j) {
        const double xj = to.x[j];
        const double v = xj >= from.L ? values.back() : spline(xj);
        out[j] = std::clamp(v, 0.0, xj);
    }
    out.front() = 0.0;
    out.back() = out[out.size() - 2];
    return out;
}

/// One iterate of a convergence loop, kept for diagnostics.
struct Iterate {
    SpatialGrid grid;
    std::vector<double> values;
    double T = 0.0;
    double h = 0.0;
};

/// Deviations from the two-sided bracket seen during the certificate run,
/// measured at every T_step checkpoint (crossing, band) or every step
/// (monotonicity).
struct BracketDiagnostics {
    double crossing = 0.0;     ///< max(lower - upper)
    double band_excess = 0.0;  ///< max distance outside 0 <= w <= x
    MonotoneViolation lower_monotone;
    MonotoneViolation upper_monotone;
};

struct LoopTrace {
    std::size_t iterations = 0;
    StopGaps last;
};

/// Everything converge() learned, beyond the profile itself.
struct ConvergeReport {
    LoopTrace t_loop;  ///< of the final T-loop
    LoopTrace n_loop;  ///< of the final N-loop
    LoopTrace l_loop;
    LoopTrace h_loop;
    std::size_t stability_restarts = 0;
    std::optional<Iterate> previous_L;  ///< penultimate L-loop iterate of the final h level
    std::optional<Iterate> last_L;      ///< last L-loop iterate of the final h level (certificate seed)
    Iterate final_lower;
    Iterate final_upper;
    double gap = 0.0;  ///< sup(upper - lower) at the certificate time
    BracketDiagnostics bracket;
};

namespace detail {

inline std::vector<double> shortfall_at(std::span<const double> x, std::span<const double> u) {
    std::vector<double> f(x.size(), 0.0);
    for (std::size_t j = 1; j < x.size(); ++j) f[j] = std::clamp(1.0 - u[j] / x[j], 0.0, 1.0);
    return f;
}

inline StopGaps compare_on(const SpatialGrid& grid, std::span<const double> u_old, std::span<const double> u_new,
                           double split) {
    const auto f1 = shortfall_at(grid.x, u_old);
    const auto f2 = shortfall_at(grid.x, u_new);
    return stop_gaps(grid.x, f1, f2, split);
}

class Converger {
public:
    Converger(const ReducedParams& red, const SolverConfig& cfg, ConvergeReport& report)
        : red_(red), cfg_(cfg), report_(report) {}

    /// Innermost loop: grow T until consecutive layers T_step apart agree.
    /// A blow-up halves the current h and reruns this loop from `init`.
    Iterate solve_T(const SpatialGrid& grid, const std::vector<double>& init) {
        const auto op = assemble(grid, red_);
        for (;;) {
            try {
                return march_T(grid, op, init);
            } catch (const StabilityError&) {
                halve();
                ++report_.stability_restarts;
            }
        }
    }

    /// Refine N from N_start until consecutive meshes agree. `warm` (if any)
    /// seeds the first run; later runs start from the previous mesh.
    Iterate solve_N(double L, const std::optional<Iterate>& warm) {
        std::size_t N = cfg_.N_start;
        auto first_grid = build_grid(N, L);
        auto init = warm ? transfer(warm->grid, warm->values, first_grid)
                         : initial_layer(first_grid, InitialCondition::Lower);
        Iterate prev = solve_T(first_grid, init);
        auto& trace = report_.n_loop;
        for (std::size_t it = 1;; ++it) {
            N += cfg_.N_step;
            auto grid = build_grid(N, L);
            auto seeded = transfer(prev.grid, prev.values, grid);
            Iterate next = solve_T(grid, seeded);
            trace.iterations = it;
            trace.last = compare_on(next.grid, transfer(prev.grid, prev.values, next.grid), next.values,
                                    cfg_.shortfall_split);
            if (trace.last.met(cfg_)) return next;
            if (it >= cfg_.N_cap) throw ConvergenceError("N", trace.last.rel, trace.last.abs);
            prev = std::move(next);
        }
    }

    /// Grow L from L_start, warm-starting each length from the previous
    /// solution held constant beyond its end.
    Iterate solve_L() {
        double L = cfg_.L_start;
        Iterate prev = solve_N(L, std::nullopt);
        note(prev);
        auto& trace = report_.l_loop;
        for (std::size_t it = 1;; ++it) {
            L = cfg_.L_start + static_cast<double>(it) * cfg_.L_step;
            Iterate next = solve_N(L, prev);
            trace.iterations = it;
            trace.last = compare_on(next.grid, transfer(prev.grid, prev.values, next.grid), next.values,
                                    cfg_.shortfall_split);
            note(next);
            if (trace.last.met(cfg_)) {
                report_.previous_L = std::move(prev);
                return next;
            }
            if (it >= cfg_.L_cap) throw ConvergenceError("L", trace.last.rel, trace.last.abs);
            prev = std::move(next);
        }
    }

    /// Outermost loop: halve h until the L-loop result no longer moves.
    Iterate solve_h() {
        h_ = cfg_.h_start;
        Iterate prev = solve_L();
        auto& trace = report_.h_loop;
        for (std::size_t it = 1;; ++it) {
            halve();
            Iterate next = solve_L();
            trace.iterations = it;
            trace.last = compare_on(next.grid, transfer(prev.grid, prev.values, next.grid), next.values,
                                    cfg_.shortfall_split);
            if (cfg_.progress)
                cfg_.progress("h-loop " + std::to_string(it) + ": rel=" + std::to_string(trace.last.rel) +
                              " abs=" + std::to_string(trace.last.abs));
            if (trace.last.met(cfg_)) return next;
            prev = std::move(next);
        }
    }

    double h() const noexcept { return h_; }

    /// Lower and upper runs on the final mesh; the lower layer is the
    /// returned profile and sup(upper - lower) its error certificate. The
    /// upper run starts cold from w = x. The lower run continues the chosen
    /// iterate, which descends from the zero layer through the mesh and
    /// length continuation. Runs until the T-loop rule
    /// holds, the upper run has reached the chosen pseudo-time and the gap
    /// is within abs_tol.
    void certify(const Iterate& chosen) {
        const auto& grid = chosen.grid;
        const auto op = assemble(grid, red_);
        for (;;) {
            try {
                certify_once(grid, op, chosen);
                return;
            } catch (const StabilityError&) {
                halve();
                ++report_.stability_restarts;
            }
        }
    }

private:
    Iterate march_T(const SpatialGrid& grid, const DiscreteOperator& op, const std::vector<double>& init) {
        TimeMarcher m(grid, op, init, h_);
        auto& trace = report_.t_loop;
        double T = cfg_.T_start;
        m.advance_to(T);
        std::vector<double> prev = m.layer();
        for (std::size_t it = 1;; ++it) {
            T += cfg_.T_step;
            m.advance_to(T);
            trace.iterations = it;
            trace.last = compare_on(grid, prev, m.layer(), cfg_.shortfall_split);
            if (trace.last.met(cfg_)) break;
            if (it >= cfg_.T_cap) throw ConvergenceError("T", trace.last.rel, trace.last.abs);
            prev = m.layer();
        }
        return {grid, m.layer(), m.state().t, h_};
    }

    void certify_once(const SpatialGrid& grid, const DiscreteOperator& op, const Iterate& chosen) {
        const double T_min = chosen.T;
        TimeMarcher lo(grid, op, chosen.values, h_, MonotoneCheck::NonDecreasing);
        TimeMarcher hi(grid, op, initial_layer(grid, InitialCondition::Upper), h_, MonotoneCheck::NonIncreasing);
        BracketDiagnostics diag;
        auto checkpoint = [&] {
            const auto& wl = lo.layer();
            const auto& wu = hi.layer();
            double gap = 0.0;
            for (std::size_t j = 0; j < grid.x.size(); ++j) {
                gap = std::max(gap, wu[j] - wl[j]);
                diag.crossing = std::max(diag.crossing, wl[j] - wu[j]);
                diag.band_excess = std::max({diag.band_excess, -wl[j], wu[j] - grid.x[j], wl[j] - grid.x[j], -wu[j]});
            }
            return gap;
        };
        double T = cfg_.T_start;
        lo.advance_to(T);
        hi.advance_to(T);
        checkpoint();
        std::vector<double> prev = lo.layer();
        for (std::size_t it = 1;; ++it) {
            T += cfg_.T_step;
            lo.advance_to(T);
            hi.advance_to(T);
            const double gap = checkpoint();
            const auto gaps = compare_on(grid, prev, lo.layer(), cfg_.shortfall_split);
            report_.gap = gap;
            if (gaps.met(cfg_) && T >= T_min - 1e-12 && gap <= cfg_.abs_tol) break;
            if (it >= cfg_.T_cap) throw ConvergenceError("certificate", gaps.rel, gap);
            prev = lo.layer();
        }
        diag.lower_monotone = lo.state().worst;
        diag.upper_monotone = hi.state().worst;
        report_.bracket = diag;
        report_.final_lower = {grid, lo.layer(), chosen.T + lo.state().t, h_};
        report_.final_upper = {grid, hi.layer(), hi.state().t, h_};
    }

    void halve() {
        if (++halvings_ > cfg_.h_cap)
            throw ConvergenceError("h", report_.h_loop.last.rel, report_.h_loop.last.abs);
        h_ *= 0.5;
    }

    void note(const Iterate& it) const {
        if (!cfg_.progress) return;
        const auto& l = report_.l_loop.last;
        cfg_.progress("L=" + std::to_string(it.grid.L) + " N=" + std::to_string(it.grid.N) +
                      " h=" + std::to_string(it.h) + " T=" + std::to_string(it.T) +
                      " L-gap rel=" + std::to_string(l.rel) + " abs=" + std::to_string(l.abs));
    }

    ReducedParams red_;
    SolverConfig cfg_;
    ConvergeReport& report_;
    double h_ = 0.0;
    std::size_t halvings_ = 0;
};

}  // namespace detail

/// Result of converge(): the evaluator plus the loop diagnostics.
struct ConvergeResult {
    SolutionProfile profile;
    ConvergeReport report;
};

/// Runs the four nested loops (T innermost, then N, L and h) followed by
/// the two-sided certificate run.
inline ConvergeResult converge_with_report(const ReducedParams& red, const SolverConfig& cfg = {}) {
    require_admissible(red);
    cfg.validate();
    ConvergeReport report;
    detail::Converger c(red, cfg, report);
    const Iterate chosen = c.solve_h();
    c.certify(chosen);
    report.last_L = chosen;
    const auto& fin = report.final_lower;
    ProfileMetadata meta{red.a, red.b, fin.grid.L, fin.grid.N, fin.T, fin.h, report.gap};
    SolutionProfile profile(fin.grid.x, fin.values, meta, cfg.x_switch, cfg.series_order);
    return {std::move(profile), std::move(report)};
}

inline SolutionProfile converge(const ReducedParams& red, const SolverConfig& cfg = {}) {
    return converge_with_report(red, cfg).profile;
}

}  // namespace liq
