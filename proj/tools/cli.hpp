#pragma once

#include "liq/asymptotics.hpp"
#include "liq/errors.hpp"
#include "liq/io.hpp"
#include "liq/model.hpp"
#include "liq/pde_solver.hpp"
#include "liq/simulate.hpp"
#include "liq/solution.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace liq::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2 };

struct Options {
    int preset = 0;
    std::optional<double> rho, lambda, r, sigma, eta;
    std::optional<double> a, b;

    SolverConfig solver;
    SimConfig sim;

    std::string out;
    std::string profile;
    std::string paths_out;
    std::string trajectory_out;
    double s = 100.0;
    double z = 100.0;
    double zmin = 1e-2;
    double zmax = 10.0;
    std::size_t points = 50;
    std::size_t series_n = 6;
    std::vector<double> x0{0.01, 0.1, 0.5};
    bool verbose = false;
};

namespace detail {

inline bool any_model_flag(const Options& o) { return o.rho || o.lambda || o.r || o.sigma || o.eta; }

/// Preset values overridden by individual flags.
inline std::optional<ModelParams> model_from(const Options& o) {
    if (o.preset == 0 && !any_model_flag(o)) return std::nullopt;
    double rho = 0, lambda = 0, r = 0, sigma = 0, eta = 0;
    if (o.preset != 0) {
        const auto p = liq::preset(o.preset);
        rho = p.rho();
        lambda = p.lambda();
        r = p.r();
        sigma = p.sigma();
        eta = p.eta();
    } else if (!(o.rho && o.sigma && o.eta)) {
        throw ValidationError("model parameters need --rho, --sigma and --eta (or --preset)");
    }
    return ModelParams(o.rho.value_or(rho), o.lambda.value_or(lambda), o.r.value_or(r), o.sigma.value_or(sigma),
                       o.eta.value_or(eta));
}

inline ModelParams require_model(const Options& o, const char* what) {
    auto p = model_from(o);
    if (!p) throw ValidationError(std::string(what) + " needs model parameters (--preset or --rho/--sigma/--eta)");
    return *p;
}

/// Exactly one of the model or an explicit (a, b).
inline ReducedParams reduced_from(const Options& o) {
    const bool explicit_ab = o.a || o.b;
    const auto model = model_from(o);
    if (explicit_ab && model) throw ValidationError("give either model parameters or --a/--b, not both");
    if (explicit_ab) {
        if (!(o.a && o.b)) throw ValidationError("--a and --b must be given together");
        return {*o.a, *o.b};
    }
    if (!model) throw ValidationError("need model parameters (--preset, --rho ...) or --a/--b");
    return reduce(*model);
}

inline Provenance provenance(const std::string& command, const Options& o, const std::optional<ModelParams>& model,
                             const std::optional<ReducedParams>& red) {
    Provenance p;
    p.add("command", command);
    if (o.preset) p.add("preset", std::to_string(o.preset));
    if (model) {
        p.add("rho", model->rho()).add("lambda", model->lambda()).add("r", model->r());
        p.add("sigma", model->sigma()).add("eta", model->eta());
    }
    if (red) p.add("a", red->a).add("b", red->b);
    return p;
}

inline void add_solver(Provenance& p, const SolverConfig& c) {
    p.add("rel_tol", c.rel_tol).add("abs_tol", c.abs_tol).add("L_start", c.L_start).add("N_start",
                                                                                         std::uint64_t{c.N_start});
    p.add("T_start", c.T_start).add("h_start", c.h_start);
}

inline void add_sim(Provenance& p, const SimConfig& c) {
    p.add("paths", std::uint64_t{c.n_paths}).add("dt", c.dt).add("seed", c.seed).add("z_stop_rel", c.z_stop_rel);
    p.add("t_max", c.t_max).add("time_unit", "trading_days_250_per_year");
}

/// Solver settings when the profile is solved inline, else the loaded
/// profile's own metadata.
inline void add_profile(Provenance& p, const Options& o, const SolutionProfile& profile) {
    if (o.profile.empty()) add_solver(p, o.solver);
    const auto& m = profile.metadata();
    p.add("profile_L", m.L).add("profile_N", std::uint64_t{m.N}).add("profile_T", m.T).add("profile_h", m.h);
    p.add("profile_gap", m.gap);
}

inline SolutionProfile obtain_profile(const Options& o, const ReducedParams& red, std::ostream& err) {
    if (!o.profile.empty()) return load_profile(o.profile);
    SolverConfig cfg = o.solver;
    if (o.verbose) cfg.progress = [&err](const std::string& line) { err << line << '\n'; };
    return converge(red, cfg);
}

/// Writes to `path`, or to `fallback` when the path is empty.
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open " + path + " for writing");
    write(f);
    if (!f) throw ValidationError("write failed: " + path);
}

inline int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.out.empty()) throw ValidationError("solve needs --out <profile.csv>");
    const auto model = model_from(o);
    const auto red = reduced_from(o);
    SolverConfig cfg = o.solver;
    if (o.verbose) cfg.progress = [&err](const std::string& line) { err << line << '\n'; };
    const auto result = converge_with_report(red, cfg);
    auto prov = provenance("solve", o, model, red);
    add_solver(prov, o.solver);
    save_profile(result.profile, o.out, prov);
    const auto& m = result.profile.metadata();
    out << "a=" << format_double(m.a) << "\nb=" << format_double(m.b) << "\nL=" << format_double(m.L)
        << "\nN=" << m.N << "\nT=" << format_double(m.T) << "\nh=" << format_double(m.h)
        << "\ngap=" << format_double(m.gap) << "\nstability_restarts=" << result.report.stability_restarts << '\n';
    return kOk;
}

inline int cmd_impact(const Options& o, std::ostream& out, std::ostream& err) {
    const auto model = require_model(o, "impact");
    const auto red = reduce(model);
    const auto profile = obtain_profile(o, red, err);
    require_consistent(profile, model);
    std::vector<ImpactPoint> pts;
    for (double z : log_space(o.zmin, o.zmax, o.points)) pts.push_back(price_impact(profile, model, MarketState(o.s, z)));
    auto prov = provenance("impact", o, model, red);
    add_profile(prov, o, profile);
    prov.add("s", o.s).add("zmin", o.zmin).add("zmax", o.zmax).add("points", std::uint64_t{o.points});
    emit(o.out, out, [&](std::ostream& os) { write_impact_csv(os, pts, prov); });
    return kOk;
}

inline int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    const auto model = require_model(o, "simulate");
    const auto red = reduce(model);
    const auto profile = obtain_profile(o, red, err);
    require_consistent(profile, model);
    const MarketState state(o.s, o.z);
    const auto res = simulate_liquidation(profile, model, state, o.sim);
    auto prov = provenance("simulate", o, model, red);
    add_profile(prov, o, profile);
    prov.add("s", o.s).add("z", o.z);
    add_sim(prov, o.sim);
    emit(o.out, out, [&](std::ostream& os) { write_sim_summary(os, res.stats, prov); });
    if (!o.paths_out.empty())
        emit(o.paths_out, out, [&](std::ostream& os) { write_paths_csv(os, res.paths, prov); });
    if (!o.trajectory_out.empty())
        emit(o.trajectory_out, out, [&](std::ostream& os) { write_trajectory_csv(os, res.trajectory, prov); });
    return kOk;
}

inline int cmd_series(const Options& o, std::ostream& out) {
    const auto red = reduced_from(o);
    const auto s = series_coefficients(red, o.series_n);
    for (std::size_t i = 0; i < s.order(); ++i) out << "k_" << i + 1 << '=' << format_double(s.coeffs[i]) << '\n';
    const auto c = singularity_constants(red);
    out << "K1=" << format_double(c.K1) << "\nK2=" << format_double(c.K2) << "\nalpha=" << format_double(c.alpha)
        << "\nbeta=" << format_double(c.beta) << '\n';
    return kOk;
}

inline int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
    const auto model = require_model(o, "oracle");
    const auto red = reduce(model);
    const auto profile = obtain_profile(o, red, err);
    auto prov = provenance("oracle", o, model, red);
    add_profile(prov, o, profile);
    add_sim(prov, o.sim);
    prov.add("dt_hat", o.sim.dt_hat).add("t_hat_max", o.sim.t_hat_max);
    emit(o.out, out, [&](std::ostream& os) {
        prov.write(os);
        os << "x0,mc,se,profile,z_score,capped\n";
        for (double x0 : o.x0) {
            const auto est = simulate_transformed(profile, red, model, x0, o.sim);
            const double u = profile.value(x0);
            const double zs = est.se > 0.0 ? (est.mean - u) / est.se : 0.0;
            os << format_double(x0) << ',' << format_double(est.mean) << ',' << format_double(est.se) << ','
               << format_double(u) << ',' << format_double(zs) << ',' << est.capped << '\n';
        }
    });
    return kOk;
}

inline int cmd_preset(int which, std::ostream& out) {
    const auto p = liq::preset(which);
    out << "rho=" << format_double(p.rho()) << "\nlambda=" << format_double(p.lambda())
        << "\nr=" << format_double(p.r()) << "\nsigma=" << format_double(p.sigma())
        << "\neta=" << format_double(p.eta()) << '\n';
    const auto red = reduce(p);
    out << "# a=" << format_double(red.a) << " b=" << format_double(red.b)
        << " strongly_admissible=" << (check_strong_admissibility(p) ? "true" : "false") << '\n';
    return kOk;
}

}  // namespace detail

/// Parses argv, runs one subcommand and maps failures to exit codes:
/// 0 success, 1 invalid input, 2 convergence or stability failure.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Optimal liquidation: value-function solver, impact curves and Monte Carlo checks", "liq"};
    app.set_help_flag("--help", "print this help");
    app.set_version_flag("--version", std::string(kToolVersion));
    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    app.require_subcommand(1);

    Options o;
    auto* model = app.add_option_group("model");
    model->add_option("--preset", o.preset, "reference parametrization 1, 2 or 3")->check(CLI::Range(1, 3));
    model->add_option("--rho", o.rho, "discount rate (1/year)");
    model->add_option("--lambda", o.lambda, "price drift (1/year)");
    model->add_option("--r", o.r, "inventory interest rate (1/year)");
    model->add_option("--sigma", o.sigma, "volatility (1/sqrt(year))");
    model->add_option("--eta", o.eta, "temporary impact (price*year/share^2)");
    model->add_option("--a", o.a, "reduced coefficient a");
    model->add_option("--b", o.b, "reduced coefficient b");

    auto* solver = app.add_option_group("solver");
    solver->add_option("--L", o.solver.L_start, "first truncation length")->capture_default_str();
    solver->add_option("--N", o.solver.N_start, "first mesh size")->capture_default_str();
    solver->add_option("--h", o.solver.h_start, "first time step")->capture_default_str();
    solver->add_option("--T", o.solver.T_start, "first pseudo-time horizon")->capture_default_str();
    solver->add_option("--rel-tol", o.solver.rel_tol, "relative stopping tolerance")->capture_default_str();
    solver->add_option("--abs-tol", o.solver.abs_tol, "absolute stopping tolerance")->capture_default_str();
    solver->add_option("--T-cap", o.solver.T_cap, "T-loop iteration cap")->capture_default_str();
    solver->add_option("--N-cap", o.solver.N_cap, "N-loop iteration cap")->capture_default_str();
    solver->add_option("--L-cap", o.solver.L_cap, "L-loop iteration cap")->capture_default_str();
    solver->add_option("--h-cap", o.solver.h_cap, "maximum number of h halvings")->capture_default_str();
    solver->add_flag("--verbose", o.verbose, "print loop progress to stderr");

    auto* sim = app.add_option_group("simulation");
    sim->add_option("--paths", o.sim.n_paths, "Monte Carlo paths")->capture_default_str();
    sim->add_option("--dt", o.sim.dt, "time step (years)")->capture_default_str();
    sim->add_option("--dt-hat", o.sim.dt_hat, "transformed-problem step (variance years)")->capture_default_str();
    sim->add_option("--seed", o.sim.seed, "random seed")->capture_default_str();
    sim->add_option("--threads", o.sim.threads, "worker threads (0 = all cores)")->capture_default_str();
    sim->add_option("--t-max", o.sim.t_max, "horizon cap (years)")->capture_default_str();
    sim->add_option("--z-stop", o.sim.z_stop_rel, "relative inventory stop threshold")->capture_default_str();
    sim->add_option("--trajectory-paths", o.sim.trajectory_paths, "paths to dump")->capture_default_str();
    sim->add_option("--trajectory-stride", o.sim.trajectory_stride, "dump every m-th step")->capture_default_str();

    auto* io = app.add_option_group("input/output");
    io->add_option("--out", o.out, "output file (stdout when omitted; required for solve)");
    io->add_option("--profile", o.profile, "load a saved profile instead of solving");
    io->add_option("--paths-out", o.paths_out, "per-path CSV");
    io->add_option("--trajectory-out", o.trajectory_out, "trajectory CSV");
    io->add_option("--s", o.s, "price")->capture_default_str();
    io->add_option("--z", o.z, "inventory")->capture_default_str();
    io->add_option("--zmin", o.zmin, "smallest inventory in the impact sweep")->capture_default_str();
    io->add_option("--zmax", o.zmax, "largest inventory in the impact sweep")->capture_default_str();
    io->add_option("--points", o.points, "impact sweep size")->capture_default_str();
    io->add_option("--n", o.series_n, "series order")->capture_default_str();
    io->add_option("--x0", o.x0, "transformed-problem start points")->delimiter(',');

    auto* solve = app.add_subcommand("solve", "converge the value function and write profile CSV + metadata");
    auto* impact = app.add_subcommand("impact", "impact curve z,s,x,I,tau");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo liquidation under the optimal rate");
    auto* series = app.add_subcommand("series", "near-zero series coefficients and constants");
    auto* oracle = app.add_subcommand("oracle", "transformed-problem Monte Carlo against the profile");
    auto* preset = app.add_subcommand("preset", "print a reference parametrization as key=value");
    int which = 0;
    preset->add_option("which", which, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
    for (auto* sub : {solve, impact, simulate, series, oracle, preset}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        out << kToolVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }

    try {
        if (*solve) return detail::cmd_solve(o, out, err);
        if (*impact) return detail::cmd_impact(o, out, err);
        if (*simulate) return detail::cmd_simulate(o, out, err);
        if (*series) return detail::cmd_series(o, out);
        if (*oracle) return detail::cmd_oracle(o, out, err);
        if (*preset) return detail::cmd_preset(which, out);
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const StabilityError& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const ClassificationError& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kValidation;
}

}  // namespace liq::cli
