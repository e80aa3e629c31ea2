#pragma once

// Experiment runner behind the command-line tool: initial-point presets,
// operator catalog, config-driven solves and the three reference examples
// (zero of (1+t)f, minimizing ||.||_p, the Hammerstein system with
// F = (1+t)u and K = I).

#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <string>
#include <string_view>
#include <vector>

#include "lpmono/duality.hpp"
#include "lpmono/error.hpp"
#include "lpmono/grid.hpp"
#include "lpmono/io.hpp"
#include "lpmono/operators.hpp"
#include "lpmono/schedule.hpp"
#include "lpmono/solver.hpp"

namespace lpmono {

struct InitialPointPreset {
    std::string name;
    std::string formula;
    std::function<double(double)> rule;
};

/// The six tabulated initial points; `zero`, `const:c` and `csv:path` are
/// resolved by make_initial_point.
inline const std::vector<InitialPointPreset>& preset_catalog() {
    static const std::vector<InitialPointPreset> catalog = {
        {"inv-quad", "1/(1+t^2)", [](double t) { return 1.0 / (1.0 + t * t); }},
        {"exp", "e^t", [](double t) { return std::exp(t); }},
        {"quad", "t^2+1", [](double t) { return t * t + 1.0; }},
        {"cos-exp", "cos(t)e^(-t)", [](double t) { return std::cos(t) * std::exp(-t); }},
        {"inv-tsin", "1/(1+t sin t)", [](double t) { return 1.0 / (1.0 + t * std::sin(t)); }},
        {"exp-neg", "e^(-t)", [](double t) { return std::exp(-t); }},
    };
    return catalog;
}

inline GridFunction make_initial_point(const std::string& spec, std::size_t M) {
    if (spec == "zero") return GridFunction::zero(M);
    if (spec.starts_with("const:")) {
        const std::string value = spec.substr(6);
        double c = 0.0;
        try {
            c = parse_double(value);
        } catch (const IoError&) {
            throw InvalidArgument("bad constant in initial point '" + spec + "'");
        }
        return GridFunction::constant(M, c);
    }
    if (spec.starts_with("csv:")) {
        GridFunction f = load_grid_csv(spec.substr(4));
        if (f.subintervals() != M) {
            throw GridMismatch("initial point '" + spec + "' has M = " + std::to_string(f.subintervals()) +
                               ", run uses M = " + std::to_string(M));
        }
        return f;
    }
    for (const auto& preset : preset_catalog()) {
        if (preset.name == spec) return GridFunction::sample(M, preset.rule);
    }
    throw InvalidArgument("unknown initial point '" + spec +
                          "' (expected a preset name, zero, const:<c> or csv:<path>)");
}

namespace detail {

inline LpContext context_of(const RunConfig& cfg) {
    if (cfg.grid < 2) throw InvalidArgument("--grid must be >= 2");
    DualityFormula formula = DualityFormula::standard;
    if (cfg.duality_formula == "swapped") {
        formula = DualityFormula::swapped;
    } else if (cfg.duality_formula != "standard") {
        throw InvalidArgument("duality formula must be standard or swapped, got '" + cfg.duality_formula + "'");
    }
    return LpContext::make(cfg.p, static_cast<std::size_t>(cfg.grid), formula);
}

inline SubgradientVariant variant_of(const RunConfig& cfg) {
    if (cfg.subgrad_variant == "scaled") return SubgradientVariant::scaled;
    if (cfg.subgrad_variant == "duality") return SubgradientVariant::duality;
    throw InvalidArgument("subgradient variant must be scaled or duality, got '" + cfg.subgrad_variant + "'");
}

// Operators A : E -> E* usable by zero, hilbert and vi.
inline MonotoneOp monotone_from_catalog(const std::string& name, const RunConfig& cfg, const LpContext& ctx) {
    if (name == "mult") return mult_op();
    if (name == "identity") return identity_op();
    if (name == "zero") return zero_op();
    if (name == "norm-subgrad") return norm_subgradient_op(ctx, variant_of(cfg));
    if (name == "kernel") {
        if (cfg.kernel_path.empty()) throw InvalidArgument("operator 'kernel' needs --kernel <csv>");
        return hammerstein_kernel_op(load_kernel_csv(cfg.kernel_path));
    }
    throw InvalidArgument("solver '" + cfg.solver + "' expects A : E -> E* from {mult, identity, zero, "
                          "norm-subgrad, kernel}, got '" + name + "'");
}

} // namespace detail

/// Runs one solve described by `cfg`.
inline RunRecord run_config(const RunConfig& cfg) {
    const LpContext ctx = detail::context_of(cfg);
    SolveConfig sc;
    sc.tol = cfg.tol;
    sc.max_iter = cfg.max_iter;
    sc.schedule = default_schedule(cfg.gamma, cfg.theta_offset, cfg.log_base);
    sc.ctx = ctx;
    sc.divergence_guard = cfg.divergence_guard;
    if (cfg.known_zero) sc.target = ctx.zero();

    const GridFunction x1 = make_initial_point(cfg.init, ctx.M);
    RunRecord rec;
    rec.config = cfg;
    rec.schedule = schedule_json(sc.schedule.info);

    const std::string& solver = cfg.solver;
    if (solver == "zero" || solver == "hilbert") {
        const MonotoneOp A = detail::monotone_from_catalog(cfg.op, cfg, ctx);
        rec.trace = (solver == "zero" ? solve_zero(A, x1, sc) : solve_zero_hilbert(A, x1, sc)).trace;
    } else if (solver == "min") {
        if (cfg.op != "norm") {
            throw InvalidArgument("solver 'min' expects a subgradient selection of f : E -> R from {norm}, got '" +
                                  cfg.op + "'");
        }
        rec.trace = solve_min(norm_subgradient_op(ctx, detail::variant_of(cfg)), x1, sc).trace;
    } else if (solver == "vi") {
        const MonotoneOp T = detail::monotone_from_catalog(cfg.op, cfg, ctx);
        const Box box{cfg.box_lo, cfg.box_hi};
        if (!(box.lo <= 0.0 && 0.0 <= box.hi)) sc.target.reset();
        rec.trace = solve_vi(T, box, x1, sc, cfg.cone_magnitude).trace;
    } else if (solver == "jfixed") {
        MonotoneOp T;
        if (cfg.op == "J") {
            T = MonotoneOp{"J", [ctx](const GridFunction& x) { return duality_map(x, ctx); }, std::nullopt, {}};
        } else if (cfg.op.ends_with("-as-T")) {
            const std::string base = cfg.op.substr(0, cfg.op.size() - 5);
            T = j_pseudo_from_monotone(detail::monotone_from_catalog(base, cfg, ctx), ctx);
        } else {
            throw InvalidArgument("solver 'jfixed' expects T : E -> E* given as J or <operator>-as-T "
                                  "(T = J - A), got '" + cfg.op + "'");
        }
        rec.trace = solve_jfixed(T, x1, sc).trace;
    } else if (solver == "hammerstein") {
        HammersteinPair pair;
        if (cfg.op == "example3") {
            pair = hammerstein_example();
        } else if (cfg.op == "kernel") {
            if (cfg.kernel_path.empty()) throw InvalidArgument("operator 'kernel' needs --kernel <csv>");
            pair = HammersteinPair{mult_op(), hammerstein_kernel_op(load_kernel_csv(cfg.kernel_path))};
        } else {
            throw InvalidArgument("solver 'hammerstein' expects a pair F : X -> X*, K : X* -> X from "
                                  "{example3, kernel}, got '" + cfg.op + "'");
        }
        const GridFunction v1 = make_initial_point(cfg.init_v, ctx.M);
        rec.trace = solve_hammerstein(pair, x1, v1, sc).trace;
    } else {
        throw InvalidArgument("unknown solver '" + solver + "' (zero, hilbert, hammerstein, min, vi, jfixed)");
    }
    rec.summary = summarize(rec.trace);
    return rec;
}

/// Defaults of the three reference examples (p = 3/2, M = 100).
inline RunConfig example_config(int which) {
    RunConfig cfg;
    cfg.example = which;
    switch (which) {
    case 1:
        cfg.solver = "zero";
        cfg.op = "mult";
        cfg.tol = 1e-6;
        break;
    case 2:
        cfg.solver = "min";
        cfg.op = "norm";
        cfg.subgrad_variant = "scaled";
        cfg.tol = 1e-2;
        break;
    case 3:
        cfg.solver = "hammerstein";
        cfg.op = "example3";
        cfg.init_v = "inv-tsin";
        cfg.tol = 1e-6;
        break;
    default:
        throw InvalidArgument("example must be 1, 2 or 3, got " + std::to_string(which));
    }
    return cfg;
}

/// Reference tolerance ladder of each example.
inline std::vector<double> ladder_tolerances(int which) {
    switch (which) {
    case 1: return {1e-3, 1e-6, 1e-9, 1e-12, 1e-15};
    case 2: return {1e-1, 1e-2, 1e-3, 1e-4};
    case 3: return {1e-3, 1e-6, 1e-9, 1e-12};
    default: throw InvalidArgument("example must be 1, 2 or 3, got " + std::to_string(which));
    }
}

/// Runs the solves concurrently; records come back in input order.
inline std::vector<RunRecord> run_many(const std::vector<RunConfig>& configs) {
    std::vector<std::future<RunRecord>> pending;
    pending.reserve(configs.size());
    for (const RunConfig& c : configs) pending.push_back(std::async(std::launch::async, run_config, c));
    std::vector<RunRecord> out;
    out.reserve(configs.size());
    for (auto& f : pending) out.push_back(f.get());
    return out;
}

/// One record, or one per ladder tolerance when `ladder` is set;
/// ladder tolerances below `smallest_tol` are skipped.
inline std::vector<RunRecord> run_example(const RunConfig& cfg, bool ladder, double smallest_tol = 0.0) {
    if (!ladder) return {run_config(cfg)};
    std::vector<RunConfig> configs;
    for (double tol : ladder_tolerances(cfg.example)) {
        if (tol < smallest_tol) continue;
        RunConfig c = cfg;
        c.tol = tol;
        configs.push_back(c);
    }
    return run_many(configs);
}

} // namespace lpmono
