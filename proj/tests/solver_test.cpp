#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "lpmono/solver.hpp"

namespace lpmono {
namespace {

GridFunction inv_quad(std::size_t M = 100) {
    return GridFunction::sample(M, [](double t) { return 1.0 / (1.0 + t * t); });
}
GridFunction inv_tsin(std::size_t M = 100) {
    return GridFunction::sample(M, [](double t) { return 1.0 / (1.0 + t * std::sin(t)); });
}

SolveConfig config(double p, double tol, std::int64_t max_iter = 1'000'000) {
    SolveConfig cfg;
    cfg.ctx = LpContext::make(p);
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    return cfg;
}

// Runs exactly `steps` iterations (tol never reached).
SolveConfig fixed_steps(double p, std::int64_t steps) { return config(p, 1e-300, steps); }

std::vector<GridFunction> collect(auto&& solve) {
    std::vector<GridFunction> iterates;
    solve([&](std::int64_t, const GridFunction& x) { iterates.push_back(x); });
    return iterates;
}

void expect_trace_invariants(const IterationTrace& trace) {
    ASSERT_FALSE(trace.rows.empty());
    EXPECT_EQ(trace.rows.front().n, 2);
    for (std::size_t k = 0; k < trace.rows.size(); ++k) {
        EXPECT_GE(trace.rows[k].residual, 0.0);
        EXPECT_TRUE(std::isfinite(trace.rows[k].iterate_norm));
        if (k > 0) {
            EXPECT_EQ(trace.rows[k].n, trace.rows[k - 1].n + 1);
        }
    }
}

TEST(SolveZero, MultiplicationOperatorConverges) {
    const SolveConfig cfg = config(1.5, 1e-6);
    const SolveResult r = solve_zero(mult_op(), inv_quad(), cfg);
    expect_trace_invariants(r.trace);
    EXPECT_TRUE(r.trace.converged);
    EXPECT_FALSE(r.trace.hit_max_iter);
    EXPECT_LT(r.trace.last().residual, 1e-6);
    EXPECT_LE(lp_norm(r.x, 1.5), 0.05);
    EXPECT_GE(r.trace.nfe(), 112 / 10);
    EXPECT_LE(r.trace.nfe(), 112 * 10);
}

TEST(SolveZero, ZeroOperatorIsScalarDamping) {
    const SolveConfig cfg = fixed_steps(1.5, 60);
    const GridFunction x1 = inv_quad();
    const auto iterates = collect([&](auto obs) { solve_zero(zero_op(), x1, cfg, obs); });
    ASSERT_EQ(iterates.size(), 60u);
    double c = 1.0;
    double prev_norm = lp_norm(x1, 1.5);
    for (std::size_t k = 0; k < iterates.size(); ++k) {
        const auto n = static_cast<std::int64_t>(k + 1);
        c *= 1.0 - cfg.schedule.alpha(n) * cfg.schedule.theta(n);
        EXPECT_LT(max_abs_diff(iterates[k], c * x1), 1e-12 * c);
        const double norm = lp_norm(iterates[k], 1.5);
        EXPECT_LT(norm, prev_norm);
        prev_norm = norm;
    }
}

TEST(SolveZero, FixedPointAtZero) {
    const SolveResult r = solve_zero(mult_op(), GridFunction::zero(100), config(1.5, 1e-6));
    EXPECT_TRUE(r.x.is_zero());
    EXPECT_EQ(r.trace.nfe(), 1);
    EXPECT_EQ(r.trace.last().residual, 0.0);
    EXPECT_TRUE(r.trace.converged);
}

TEST(SolveZero, MaxIterIsFlagged) {
    const SolveResult r = solve_zero(mult_op(), inv_quad(), config(1.5, 1e-12, 5));
    EXPECT_EQ(r.trace.nfe(), 5);
    EXPECT_FALSE(r.trace.converged);
    EXPECT_TRUE(r.trace.hit_max_iter);
    EXPECT_GE(r.trace.last().residual, 1e-12);
}

TEST(SolveZero, TargetColumnIsPhiToZero) {
    SolveConfig cfg = config(1.5, 1e-3);
    cfg.target = cfg.ctx.zero();
    const SolveResult r = solve_zero(mult_op(), inv_quad(), cfg);
    for (const TraceRow& row : r.trace.rows) {
        ASSERT_TRUE(row.phi_to_target.has_value());
        EXPECT_NEAR(*row.phi_to_target, row.iterate_norm * row.iterate_norm, 1e-14);
    }
    const SolveResult plain = solve_zero(mult_op(), inv_quad(), config(1.5, 1e-3));
    EXPECT_FALSE(plain.trace.last().phi_to_target.has_value());
}

TEST(SolveZero, DivergenceGuard) {
    SolveConfig cfg = config(1.5, 1e-6);
    cfg.divergence_guard = 2.0;
    const MonotoneOp expanding{"expanding",
                               [](const GridFunction& x) { return -10.0 * x; }, std::nullopt, {}};
    EXPECT_THROW(solve_zero(expanding, GridFunction::constant(100, 1.0), cfg), DivergenceError);
}

TEST(SolveZero, NonFiniteIterate) {
    const MonotoneOp broken{"nan", [](const GridFunction& x) {
                                return x.map([](double, double) { return std::numeric_limits<double>::quiet_NaN(); });
                            },
                            std::nullopt, {}};
    EXPECT_THROW(solve_zero(broken, inv_quad(), config(1.5, 1e-6)), NonFiniteError);
}

TEST(SolveZero, ConfigValidation) {
    EXPECT_THROW(solve_zero(mult_op(), inv_quad(), config(1.5, 0.0)), InvalidArgument);
    EXPECT_THROW(solve_zero(mult_op(), inv_quad(), config(1.5, 1e-6, 0)), InvalidArgument);
    EXPECT_THROW(solve_zero(mult_op(), inv_quad(50), config(1.5, 1e-6)), GridMismatch);
}

TEST(SolveZero, Deterministic) {
    const SolveConfig cfg = config(1.5, 1e-6);
    const SolveResult a = solve_zero(mult_op(), inv_quad(), cfg);
    const SolveResult b = solve_zero(mult_op(), inv_quad(), cfg);
    ASSERT_EQ(a.trace.nfe(), b.trace.nfe());
    EXPECT_EQ(a.x, b.x);
    for (std::size_t k = 0; k < a.trace.rows.size(); ++k) {
        EXPECT_EQ(a.trace.rows[k].residual, b.trace.rows[k].residual);
        EXPECT_EQ(a.trace.rows[k].iterate_norm, b.trace.rows[k].iterate_norm);
    }
}

TEST(SolveZeroHilbert, MatchesScalarRecursionAndGeneralSolver) {
    const SolveConfig cfg = fixed_steps(2.0, 50);
    const GridFunction x1 = inv_quad();
    const auto hilbert = collect([&](auto obs) { solve_zero_hilbert(mult_op(), x1, cfg, obs); });
    const auto general = collect([&](auto obs) { solve_zero(mult_op(), x1, cfg, obs); });
    ASSERT_EQ(hilbert.size(), 50u);
    ASSERT_EQ(general.size(), 50u);

    // x_{n+1}(t_i) = x_n(t_i) (1 - alpha_n (1 + t_i + theta_n)), node by node
    std::vector<double> scalar(x1.values().begin(), x1.values().end());
    for (std::size_t k = 0; k < 50; ++k) {
        const auto n = static_cast<std::int64_t>(k + 1);
        const double a = cfg.schedule.alpha(n), th = cfg.schedule.theta(n);
        for (std::size_t i = 0; i < scalar.size(); ++i) scalar[i] *= 1.0 - a * (1.0 + x1.node(i) + th);
        const GridFunction oracle(scalar);
        EXPECT_LE(max_abs_diff(hilbert[k], oracle), 1e-12);
        EXPECT_LE(max_abs_diff(general[k], oracle), 1e-12);
        EXPECT_LE(max_abs_diff(hilbert[k], general[k]), 1e-12);
    }
}

TEST(SolveZeroHilbert, ZeroStaysZeroAndNeedsPEqualTwo) {
    const SolveResult r = solve_zero_hilbert(mult_op(), GridFunction::zero(100), config(2.0, 1e-6));
    EXPECT_TRUE(r.x.is_zero());
    EXPECT_THROW(solve_zero_hilbert(mult_op(), inv_quad(), config(1.5, 1e-6)), InvalidArgument);
}

TEST(SolveHammerstein, ExampleConverges) {
    const SolveConfig cfg = config(1.5, 1e-6);
    const HammersteinResult r = solve_hammerstein(hammerstein_example(), inv_quad(), inv_tsin(), cfg);
    expect_trace_invariants(r.trace);
    EXPECT_TRUE(r.trace.converged);
    EXPECT_LT(r.trace.last().residual, 1e-6);
    ASSERT_TRUE(r.trace.last().residual_q.has_value());
    EXPECT_LT(*r.trace.last().residual_q, 1e-6);
    EXPECT_LE(lp_norm(r.u, 1.5), 0.05);
    EXPECT_LE(lp_norm(r.v, 3.0), 0.05);
    EXPECT_GE(r.trace.nfe(), 247 / 10);
    EXPECT_LE(r.trace.nfe(), 247 * 10);
}

TEST(SolveHammerstein, ZeroStaysZero) {
    const HammersteinResult r =
        solve_hammerstein(hammerstein_example(), GridFunction::zero(100), GridFunction::zero(100), config(1.5, 1e-6));
    EXPECT_TRUE(r.u.is_zero());
    EXPECT_TRUE(r.v.is_zero());
    EXPECT_EQ(r.trace.nfe(), 1);
}

TEST(SolveHammerstein, MatchesProductSpaceRecursion) {
    const SolveConfig cfg = fixed_steps(1.5, 20);
    const HammersteinPair pair = hammerstein_example();
    std::vector<ProductPoint> coupled, product;
    solve_hammerstein(pair, inv_quad(), inv_tsin(), cfg,
                      [&](std::int64_t, const GridFunction& u, const GridFunction& v) { coupled.push_back({u, v}); });
    solve_product_zero(product_op(pair), ProductPoint{inv_quad(), inv_tsin()}, cfg,
                       [&](std::int64_t, const GridFunction& u, const GridFunction& v) { product.push_back({u, v}); });
    ASSERT_EQ(coupled.size(), 20u);
    ASSERT_EQ(product.size(), 20u);
    for (std::size_t k = 0; k < 20; ++k) {
        EXPECT_LE(max_abs_diff(coupled[k].u, product[k].u), 1e-10);
        EXPECT_LE(max_abs_diff(coupled[k].v, product[k].v), 1e-10);
    }
}

TEST(SolveMin, NormMinimization) {
    const SolveConfig cfg = config(1.5, 1e-2);
    const SolveResult r = solve_min(norm_subgradient_op(cfg.ctx), inv_quad(), cfg);
    EXPECT_TRUE(r.trace.converged);
    EXPECT_LT(r.trace.last().residual, 1e-2);
    // the iterates oscillate around 0 with period two; the quarter means of
    // the norm shrink
    const auto& rows = r.trace.rows;
    ASSERT_GT(rows.size(), 20u);
    const std::size_t q = rows.size() / 4;
    double prev_mean = lp_norm(inv_quad(), 1.5);
    for (std::size_t part = 0; part < 4; ++part) {
        const std::size_t end = part == 3 ? rows.size() : (part + 1) * q;
        double sum = 0.0;
        for (std::size_t k = part * q; k < end; ++k) sum += rows[k].iterate_norm;
        const double mean = sum / static_cast<double>(end - part * q);
        EXPECT_LT(mean, prev_mean) << "quarter " << part;
        prev_mean = mean;
    }
}

TEST(SolveMin, ZeroIsTheMinimizer) {
    const SolveConfig cfg = config(1.5, 1e-2);
    const SolveResult r = solve_min(norm_subgradient_op(cfg.ctx), GridFunction::zero(100), cfg);
    EXPECT_TRUE(r.x.is_zero());
    EXPECT_EQ(r.trace.nfe(), 1);
}

TEST(SolveVi, InteriorRunCoincidesWithZeroSolver) {
    const SolveConfig cfg = config(1.5, 1e-6);
    const SolveResult vi = solve_vi(mult_op(), {-2.0, 2.0}, inv_quad(), cfg);
    const SolveResult zero = solve_zero(mult_op(), inv_quad(), cfg);
    EXPECT_EQ(vi.x, zero.x);
    ASSERT_EQ(vi.trace.nfe(), zero.trace.nfe());
    for (std::size_t k = 0; k < vi.trace.rows.size(); ++k) {
        EXPECT_EQ(vi.trace.rows[k].residual, zero.trace.rows[k].residual);
        ASSERT_TRUE(vi.trace.rows[k].violation.has_value());
        EXPECT_EQ(*vi.trace.rows[k].violation, 0.0);
    }
    EXPECT_LE(lp_norm(vi.x, 1.5), 0.05);
}

TEST(SolveVi, TouchingTheBoundaryIsNotInterior) {
    // 1/(1+t^2) equals 1 at t = 0, so the selection is nonzero there and the
    // next iterate leaves [-1, 1]
    const SolveConfig cfg = config(1.5, 1e-6);
    EXPECT_FALSE(vi_normal_cone_selection(inv_quad(), {-1.0, 1.0}).is_zero());
    EXPECT_THROW(solve_vi(mult_op(), {-1.0, 1.0}, inv_quad(), cfg), InfeasiblePoint);
}

TEST(SolveVi, BoundaryStartUsesConeSelection) {
    const SolveConfig cfg = fixed_steps(1.5, 1);
    const GridFunction x1 = GridFunction::constant(100, 1.0);
    const double magnitude = 0.5;
    const SolveResult r = solve_vi(mult_op(), {-1.0, 1.0}, x1, cfg, magnitude);

    const double a = cfg.schedule.alpha(1), th = cfg.schedule.theta(1);
    const GridFunction beta = GridFunction::constant(100, magnitude);
    const GridFunction jx = duality_map(x1, cfg.ctx);
    const GridFunction expected = duality_map_inverse(jx - a * (mult_op()(x1) + beta) - (a * th) * jx, cfg.ctx);
    EXPECT_LT(max_abs_diff(r.x, expected), 1e-15);
    const GridFunction without_cone = solve_zero(mult_op(), x1, cfg).x;
    EXPECT_GT(max_abs_diff(r.x, without_cone), 0.0);
}

TEST(SolveVi, InfeasibleStart) {
    EXPECT_THROW(solve_vi(mult_op(), {-1.0, 1.0}, GridFunction::constant(100, 2.0), config(1.5, 1e-6)),
                 InfeasiblePoint);
}

TEST(SolveJFixed, MatchesZeroSolverOnJMinusA) {
    const SolveConfig cfg = fixed_steps(1.5, 50);
    const GridFunction x1 = inv_quad();
    const auto jfixed = collect([&](auto obs) { solve_jfixed(j_pseudo_from_monotone(mult_op(), cfg.ctx), x1, cfg, obs); });
    const auto zero = collect([&](auto obs) { solve_zero(mult_op(), x1, cfg, obs); });
    ASSERT_EQ(jfixed.size(), 50u);
    for (std::size_t k = 0; k < 50; ++k) EXPECT_LE(max_abs_diff(jfixed[k], zero[k]), 1e-12);
}

TEST(SolveJFixed, DualityMapGivesPureDamping) {
    const SolveConfig cfg = fixed_steps(1.5, 30);
    const LpContext ctx = cfg.ctx;
    const MonotoneOp T{"J", [ctx](const GridFunction& x) { return duality_map(x, ctx); }, std::nullopt, {}};
    const GridFunction x1 = inv_quad();
    const auto iterates = collect([&](auto obs) { solve_jfixed(T, x1, cfg, obs); });
    double c = 1.0;
    for (std::size_t k = 0; k < iterates.size(); ++k) {
        const auto n = static_cast<std::int64_t>(k + 1);
        c *= 1.0 - cfg.schedule.alpha(n) * cfg.schedule.theta(n);
        EXPECT_LT(max_abs_diff(iterates[k], c * x1), 1e-12);
    }
}

TEST(SolveJFixed, StartingAtAFixedPointStays) {
    const SolveConfig cfg = config(1.5, 1e-6);
    const SolveResult r = solve_jfixed(j_pseudo_from_monotone(mult_op(), cfg.ctx), GridFunction::zero(100), cfg);
    EXPECT_TRUE(r.x.is_zero());
    EXPECT_EQ(r.trace.nfe(), 1);
}

TEST(RegularizationPath, Residuals) {
    const LpContext ctx = LpContext::make(1.5);
    EXPECT_EQ(regularization_path_residual(mult_op(), GridFunction::zero(100), 0.5, ctx), 0.0);

    const double c = 2.0, theta = 0.3;
    const GridFunction y = GridFunction::constant(100, c);
    const GridFunction direct = GridFunction::sample(100, [&](double t) { return theta * c + (1.0 + t) * c; });
    EXPECT_NEAR(regularization_path_residual(mult_op(), y, theta, ctx), lp_norm(direct, ctx.q), 1e-14);
    EXPECT_GT(regularization_path_residual(mult_op(), y, theta, ctx), 0.0);
    EXPECT_THROW(regularization_path_residual(mult_op(), y, 0.0, ctx), InvalidArgument);
}

TEST(RegularizationPath, ConvergedIterateReport) {
    const SolveConfig cfg = config(1.5, 1e-6);
    const SolveResult r = solve_zero(mult_op(), inv_quad(), cfg);
    const double theta = cfg.schedule.theta(r.trace.last().n);
    const double residual = regularization_path_residual(mult_op(), r.x, theta, cfg.ctx);
    RecordProperty("path_residual", std::to_string(residual));
    EXPECT_TRUE(std::isfinite(residual));
}

} // namespace
} // namespace lpmono
