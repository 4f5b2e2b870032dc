// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--strict] [--only 1,2,...]
//
// Exit status is 0 once every selected criterion has produced a verdict;
// with --strict it is the number of FAIL lines.

#include "liq/asymptotics.hpp"
#include "liq/io.hpp"
#include "liq/model.hpp"
#include "liq/pde_solver.hpp"
#include "liq/simulate.hpp"
#include "liq/solution.hpp"
#include "support/series_oracle.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/rational.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using liq::MarketState;

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

std::string num(double v, int digits = 4) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Default solver settings; each parametrization is solved once.
const liq::ConvergeResult& solved(int preset) {
    static std::map<int, std::unique_ptr<liq::ConvergeResult>> cache;
    auto& slot = cache[preset];
    if (!slot) {
        const auto t0 = std::chrono::steady_clock::now();
        slot = std::make_unique<liq::ConvergeResult>(liq::converge_with_report(liq::reduce(liq::preset(preset))));
        const auto& m = slot->profile.metadata();
        std::printf("  [solve] parametrization %d: L=%g N=%zu h=%g T=%g gap=%.3g restarts=%zu (%.0f s)\n", preset,
                    m.L, m.N, m.h, m.T, m.gap, slot->report.stability_restarts, elapsed(t0));
        std::fflush(stdout);
    }
    return *slot;
}

liq::SimConfig mc_config(std::size_t paths) {
    liq::SimConfig cfg;
    cfg.n_paths = paths;
    cfg.seed = 20240601;
    cfg.threads = 0;
    return cfg;
}

Verdict reduction_exact() {
    using Q = boost::rational<long long>;
    struct Row {
        Q rho, lambda, r, sigma, a, b;
    };
    const Row rows[] = {
        {Q(1, 20), Q(0), Q(0), Q(1, 5), Q(2), Q(1, 2)},
        {Q(0), Q(-1, 10), Q(0), Q(1, 5), Q(-3), Q(8)},
        {Q(1, 20), Q(3, 100), Q(1, 100), Q(1, 5), Q(3), Q(-5, 2)},
    };
    Verdict v;
    int i = 1;
    for (const auto& row : rows) {
        const auto red = liq::reduce<Q>(row.rho, row.lambda, row.r, row.sigma);
        std::ostringstream os;
        os << "P" << i++ << " -> (" << red.a << ", " << red.b << ")";
        v.require(red.a == row.a && red.b == row.b, os.str());
    }
    return v;
}

Verdict eta_calibration() {
    Verdict v;
    const double e1 = liq::calibrate_eta(0.0018, 100.0, 5.0, 120000.0);
    const double e2 = liq::calibrate_eta(0.003, 100.0, 5.0, 120000.0);
    const double r1 = std::abs(e1 / 7.5e-6 - 1.0);
    const double r2 = std::abs(e2 / 1.25e-5 - 1.0);
    v.require(r1 < 1e-12, "0.18% -> " + num(e1, 17) + " rel err " + num(r1, 2));
    v.require(r2 < 1e-12, "0.3% -> " + num(e2, 17) + " rel err " + num(r2, 2));
    return v;
}

Verdict series_oracle() {
    using Big = boost::multiprecision::cpp_bin_float_50;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ua(-4.0, 4.0);
    std::uniform_real_distribution<double> us(0.05, 6.0);
    double worst_rel = 0.0;
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const double a = ua(rng);
        const double b = us(rng) - a;
        const auto s = liq::series_coefficients({a, b}, 6);
        const auto o = oracle::coefficients(a, b, 6);
        for (std::size_t i = 1; i < 6; ++i)
            worst_rel = std::max(worst_rel, std::abs(s.coeffs[i] - o[i]) / std::max(std::abs(o[i]), 1e-300));
        // |R(h_6)| / x^4 against the oracle's leading residual coefficient.
        const double lead = std::abs(oracle::residual(s.coeffs, a, b, 8)[8]);
        const auto k = liq::recursion_coefficients<Big>(Big(a), Big(b), 6);
        for (double e = -8.0; e <= -4.0 + 1e-9; e += 0.125) {
            const Big x = boost::multiprecision::pow(Big(10), Big(e));
            const Big scaled = abs(liq::series_residual<Big>(k, Big(a), Big(b), x)) / (x * x * x * x);
            worst_ratio = std::max(worst_ratio, scaled.convert_to<double>() / std::max(lead, 1e-300));
        }
    }
    Verdict v;
    v.require(worst_rel <= 1e-10, "max rel diff k_2..k_6 " + num(worst_rel, 2));
    v.require(std::isfinite(worst_ratio) && worst_ratio <= 2.0,
              "max |R|/x^4 over leading coefficient " + num(worst_ratio, 4) + " (<= 2)");
    return v;
}

Verdict special_solutions() {
    Verdict v;
    for (const liq::ReducedParams red : {liq::ReducedParams{-1.0, 2.25}, liq::ReducedParams{1.0, 1.5}}) {
        const auto sol = liq::special_solution(red);
        if (!sol) {
            v.require(false, "no special solution for (" + num(red.a) + ", " + num(red.b) + ")");
            continue;
        }
        double worst = 0.0;
        for (double x : liq::log_space(1e-6, 1.0, 400))
            worst = std::max(worst, std::abs(liq::series_residual(sol->series, x)));
        v.require(worst < 1e-10, "(" + num(red.a) + ", " + num(red.b) + ") max residual " + num(worst, 2));
    }
    return v;
}

Verdict bracketing() {
    const liq::ReducedParams red{2.0, 0.5};
    const double h = 1e-5;
    const auto grid = liq::build_grid(500, 10.0);
    const auto op = liq::assemble(grid, red);
    liq::TimeMarcher lo(grid, op, liq::initial_layer(grid, liq::InitialCondition::Lower), h,
                        liq::MonotoneCheck::NonDecreasing);
    liq::TimeMarcher hi(grid, op, liq::initial_layer(grid, liq::InitialCondition::Upper), h,
                        liq::MonotoneCheck::NonIncreasing);
    double crossing = 0.0;
    double band = 0.0;
    auto checkpoint = [&](double T) {
        lo.advance_to(T);
        hi.advance_to(T);
        double gap = 0.0;
        for (std::size_t j = 0; j < grid.x.size(); ++j) {
            const double l = lo.layer()[j];
            const double u = hi.layer()[j];
            gap = std::max(gap, u - l);
            crossing = std::max(crossing, l - u);
            band = std::max({band, -l, u - grid.x[j]});
        }
        return gap;
    };
    double gap2 = 0.0;
    double gap_unit = 0.0;
    for (int i = 1; i <= 20; ++i) gap2 = checkpoint(0.1 * i);
    for (std::size_t j = 0; j < grid.x.size() && grid.x[j] <= 1.0; ++j)
        gap_unit = std::max(gap_unit, hi.layer()[j] - lo.layer()[j]);
    const double gap21 = checkpoint(2.1);
    const double rate = (gap2 - gap21) / 0.1;
    const double mono = std::max(lo.state().worst.amount, hi.state().worst.amount);

    Verdict v;
    v.require(mono <= 1e-9, "worst wrong-way step " + num(mono, 3) + " (node " +
                                std::to_string(lo.state().worst.amount >= hi.state().worst.amount
                                                   ? lo.state().worst.node
                                                   : hi.state().worst.node) +
                                ")");
    v.require(crossing <= 1e-9 && band <= 1e-9, "lower-upper crossing " + num(crossing, 3) + ", band excess " +
                                                    num(band, 3));
    v.require(gap2 < 10.0 * rate, "gap(2) " + num(gap2, 4) + " vs 10x decay rate " + num(10.0 * rate, 4));
    v.require(gap2 < 1e-3, "gap(2) < 1e-3 (gap on [0,1]: " + num(gap_unit, 3) + ")");
    return v;
}

Verdict profile_properties() {
    const auto& res = solved(1);
    const auto& p = res.profile;
    const auto x = p.nodes();
    const auto u = p.values();
    double band = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) band = std::max({band, -u[j], u[j] - x[j]});
    double concave = -INFINITY;
    for (double d : liq::second_differences(x, u)) concave = std::max(concave, d);
    double slope_lo = INFINITY;
    double slope_hi = -INFINITY;
    for (double xj : x) {
        if (xj < p.x_switch() || xj > p.L()) continue;
        const double d = p.raw_grid_slope(xj);
        slope_lo = std::min(slope_lo, d);
        slope_hi = std::max(slope_hi, d);
    }
    const double origin = (u[1] - u[0]) / (x[1] - x[0]);

    Verdict v;
    v.require(band <= 0.0, "max excess outside 0 <= u <= x " + num(band, 3));
    v.require(concave <= 1e-6, "max second difference " + num(concave, 3));
    v.require(slope_lo >= 0.0 && slope_hi <= 1.0, "du in [" + num(slope_lo, 4) + ", " + num(slope_hi, 6) + "]");
    v.require(std::abs(origin - 1.0) <= 0.05, "origin slope " + num(origin, 5));
    if (!res.report.previous_L || !res.report.last_L) {
        v.require(false, "L-loop iterates not recorded");
        return v;
    }
    // Two consecutive L-loop iterates, both at the final h level.
    const auto& prev = *res.report.previous_L;
    const auto& last = *res.report.last_L;
    const liq::CubicSpline spline(prev.grid.x, prev.values);
    double worst = -INFINITY;
    double where = 0.0;
    for (std::size_t j = 0; j < last.grid.x.size() && last.grid.x[j] <= prev.grid.L; ++j) {
        const double d = spline(last.grid.x[j]) - last.values[j];
        if (d > worst) {
            worst = d;
            where = last.grid.x[j];
        }
    }
    v.require(worst <= 1e-8, "max u_{L-step} - u_L " + num(worst, 3) + " at x=" + num(where, 3) + " (L " +
                                 num(prev.grid.L, 3) + " -> " + num(last.grid.L, 3) + ")");
    // Diagnostics without a verdict.
    std::printf("  [info] handoff mismatch at x_sw %.3g\n", liq::handoff_mismatch(p));
    double near = 0.0;
    for (std::size_t j = 1; j < x.size() && x[j] <= 1e-3; ++j) {
        const auto& s = p.series();
        const double ser = liq::series_eval(s, x[j], liq::optimal_truncation(s, x[j])).u;
        near = std::max(near, std::abs(u[j] / ser - 1.0));
    }
    std::printf("  [info] grid vs series on [x_1, 1e-3]: max rel diff %.3g\n", near);
    return v;
}

Verdict sqrt_law() {
    const auto& p = solved(1).profile;
    const auto m = liq::preset(1);
    const auto fit = liq::empirical_sqrt_fit(p, m, 100.0, liq::log_space(1e-2, 10.0, 61));
    const double want = 4.0 / 3.0 * std::sqrt(m.eta() * (m.rho() - m.lambda() - m.r()) / 100.0);
    const double rel = std::abs(fit.prefactor / want - 1.0);
    Verdict v;
    v.require(std::abs(fit.exponent - 0.5) <= 0.03, "exponent " + num(fit.exponent, 5));
    v.require(rel <= 0.05, "prefactor " + num(fit.prefactor, 5) + " vs " + num(want, 5) + " (rel " + num(rel, 2) + ")");
    return v;
}

Verdict liquidation_times() {
    const double reference[] = {6.17, 4.36, 13.80};
    Verdict v;
    for (int k = 1; k <= 3; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto& p = solved(k).profile;
        const auto res = liq::simulate_liquidation(p, liq::preset(k), MarketState(100.0, 100.0), mc_config(10000));
        const double mean = res.stats.mean_T_days;
        const double ref = reference[k - 1];
        v.require(res.stats.capped == 0 && std::abs(mean / ref - 1.0) <= 0.10,
                  "P" + std::to_string(k) + " " + num(mean, 5) + " d (ref " + num(ref, 4) + ", se " +
                      num(res.stats.se_T_days, 2) + ", " + num(elapsed(t0), 3) + " s)");
    }
    return v;
}

Verdict revenue_consistency() {
    const auto& p = solved(1).profile;
    const auto m = liq::preset(1);
    const MarketState st(100.0, 100.0);
    const double V = liq::value_function(p, m, st);
    auto coarse = mc_config(10000);
    coarse.brownian_substeps = 2;
    auto fine = mc_config(10000);
    fine.dt = coarse.dt / 2.0;
    const auto a = liq::simulate_liquidation(p, m, st, coarse);
    const auto b = liq::simulate_liquidation(p, m, st, fine);
    const double bias = std::abs(a.stats.mean_revenue - b.stats.mean_revenue);
    const double z = std::abs(b.stats.mean_revenue - V) / b.stats.se_revenue;
    Verdict v;
    v.require(bias < a.stats.se_revenue, "dt-halving shift " + num(bias, 3) + " vs 1 SE " + num(a.stats.se_revenue, 3));
    v.require(z <= 3.0, "revenue " + num(b.stats.mean_revenue, 8) + " vs V " + num(V, 8) + " (" + num(z, 3) + " SE)");
    return v;
}

Verdict transformed_oracle() {
    const auto& p = solved(1).profile;
    const auto m = liq::preset(1);
    const auto red = liq::reduce(m);
    Verdict v;
    for (double x0 : {0.01, 0.1, 0.5}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto est = liq::simulate_transformed(p, red, m, x0, mc_config(10000));
        const double u = p.value(x0);
        const double z = std::abs(est.mean - u) / est.se;
        v.require(est.capped == 0 && z <= 3.0, "x0=" + num(x0) + ": " + num(est.mean, 6) + " vs " + num(u, 6) + " (" +
                                                   num(z, 3) + " SE, " + num(elapsed(t0), 3) + " s)");
    }
    return v;
}

Verdict determinism() {
    const auto& p = solved(1).profile;
    const auto m = liq::preset(1);
    liq::Provenance prov;
    prov.add("seed", std::uint64_t{7}).add("paths", std::uint64_t{2000});
    auto render = [&](unsigned threads) {
        auto cfg = mc_config(2000);
        cfg.seed = 7;
        cfg.threads = threads;
        cfg.trajectory_paths = 3;
        cfg.trajectory_stride = 50;
        const auto res = liq::simulate_liquidation(p, m, MarketState(100.0, 100.0), cfg);
        std::ostringstream os;
        liq::write_sim_summary(os, res.stats, prov);
        liq::write_paths_csv(os, res.paths, prov);
        liq::write_trajectory_csv(os, res.trajectory, prov);
        return os.str();
    };
    const auto serial = render(1);
    const auto again = render(1);
    const auto par = render(4);
    const auto all = render(0);
    Verdict v;
    v.require(serial == again, "serial repeat identical");
    v.require(serial == par, "4 threads identical");
    v.require(serial == all, "hardware threads identical (" + std::to_string(serial.size()) + " bytes)");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    bool strict = false;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0) {
            strict = true;
        } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string item; std::getline(ss, item, ',');) only.insert(std::stoi(item));
        } else {
            std::fprintf(stderr, "usage: acceptance [--strict] [--only 1,2,...]\n");
            return 64;
        }
    }
    setvbuf(stdout, nullptr, _IOLBF, 0);

    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"parameter reduction is exact", reduction_exact},
        {"eta calibration", eta_calibration},
        {"series recursion vs brute-force oracle", series_oracle},
        {"special-solution residual", special_solutions},
        {"bracketing and monotone convergence at L=10", bracketing},
        {"converged profile properties", profile_properties},
        {"square-root law", sqrt_law},
        {"mean liquidation times", liquidation_times},
        {"revenue vs value function", revenue_consistency},
        {"transformed-problem oracle", transformed_oracle},
        {"determinism across thread counts", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        failures += v.pass ? 0 : 1;
        std::printf("%s %2d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first, v.detail.c_str(),
                    elapsed(t0));
    }
    std::printf("%d criteria failed\n", failures);
    return strict ? failures : 0;
}
