#pragma once

/*
 * One-step regularized iteration for zeros of a bounded maximal monotone
 * operator A : L_p -> L_q,
 *
 *     x_{n+1} = J^{-1}( J x_n - alpha_n A x_n - alpha_n theta_n J x_n ),
 *
 * and the variants built on it: the J-free Hilbert form (p = 2), the coupled
 * Hammerstein recursion and its product-space form, subgradient descent for
 * convex minimization, box-constrained variational inequalities and
 * J-fixed points.
 *
 * Every solver stops when ||x_n - x_{n-1}||_p < tol (for the Hammerstein
 * system both residuals must be below tol) or after max_iter operator
 * applications. NFE is the number of operator applications.
 */

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lpmono/duality.hpp"
#include "lpmono/error.hpp"
#include "lpmono/grid.hpp"
#include "lpmono/operators.hpp"
#include "lpmono/schedule.hpp"

namespace lpmono {

struct SolveConfig {
    double tol = 1e-6;
    std::int64_t max_iter = 1'000'000;
    ParamSchedule schedule = default_schedule();
    LpContext ctx = LpContext::make(1.5);
    double divergence_guard = 1e6;
    // Known zero of the operator; fills the phi_to_target column.
    std::optional<GridFunction> target;

    void validate() const {
        if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0, got " + std::to_string(tol));
        if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1, got " + std::to_string(max_iter));
        if (!(divergence_guard > 0.0)) throw InvalidArgument("divergence guard must be > 0");
    }
};

struct TraceRow {
    std::int64_t n = 0;                    // index of the new iterate, from 2
    double residual = 0.0;                 // ||x_n - x_{n-1}||_p
    std::optional<double> residual_q;      // ||v_n - v_{n-1}||_q for the Hammerstein system
    double iterate_norm = 0.0;             // ||x_n||_p (||u_n||_p for Hammerstein)
    std::optional<double> iterate_norm_q;  // ||v_n||_q
    std::optional<double> phi_to_target;   // phi(target, x_n)
    std::optional<double> violation;       // box violation of x_n (variational inequalities)
    double elapsed = 0.0;                  // seconds since the solve started
};

struct IterationTrace {
    std::vector<TraceRow> rows;
    bool converged = false;
    bool hit_max_iter = false;

    std::int64_t nfe() const { return static_cast<std::int64_t>(rows.size()); }
    const TraceRow& last() const { return rows.back(); }
};

struct SolveResult {
    GridFunction x;
    IterationTrace trace;
};

struct HammersteinResult {
    GridFunction u;
    GridFunction v;
    IterationTrace trace;
};

struct ProductResult {
    ProductPoint z;
    IterationTrace trace;
};

using IterateObserver = std::function<void(std::int64_t n, const GridFunction& x)>;
using PairObserver = std::function<void(std::int64_t n, const GridFunction& u, const GridFunction& v)>;

namespace detail {

inline void guard_iterate(const GridFunction& x, double norm, double guard, std::int64_t n, const char* what) {
    if (!x.all_finite()) {
        throw NonFiniteError(std::string(what) + " iterate " + std::to_string(n) + " has non-finite nodes");
    }
    if (norm > guard) {
        throw DivergenceError(std::string(what) + " iterate " + std::to_string(n) + " has norm " +
                              std::to_string(norm) + " above the divergence guard " + std::to_string(guard));
    }
}

// Shared driver for single-function recursions. step(x, alpha, theta, n)
// returns x_{n+1}; decorate(row, x_next) may fill optional columns.
template <typename Step, typename Decorate>
SolveResult iterate_single(GridFunction x, const SolveConfig& cfg, Step&& step, Decorate&& decorate,
                           const IterateObserver& observer, const char* what) {
    cfg.validate();
    require_same_grid(x, cfg.ctx.zero());
    const auto start = std::chrono::steady_clock::now();
    IterationTrace trace;
    for (std::int64_t n = 1; n <= cfg.max_iter; ++n) {
        const double alpha = cfg.schedule.alpha(n);
        const double theta = cfg.schedule.theta(n);
        GridFunction next = step(x, alpha, theta, n);

        TraceRow row;
        row.n = n + 1;
        row.residual = lp_norm(next - x, cfg.ctx.p);
        row.iterate_norm = lp_norm(next, cfg.ctx.p);
        guard_iterate(next, row.iterate_norm, cfg.divergence_guard, row.n, what);
        if (cfg.target) row.phi_to_target = lyapunov_phi(*cfg.target, next, cfg.ctx);
        decorate(row, next);
        row.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        trace.rows.push_back(row);

        x = std::move(next);
        if (observer) observer(row.n, x);
        if (row.residual < cfg.tol) {
            trace.converged = true;
            break;
        }
    }
    trace.hit_max_iter = !trace.converged;
    return {std::move(x), std::move(trace)};
}

inline void no_decoration(TraceRow&, const GridFunction&) {}

} // namespace detail

/// x_{n+1} = J^{-1}(J x_n - alpha_n A x_n - alpha_n theta_n J x_n).
inline SolveResult solve_zero(const MonotoneOp& A, const GridFunction& x1, const SolveConfig& cfg,
                              const IterateObserver& observer = {}) {
    const LpContext& ctx = cfg.ctx;
    return detail::iterate_single(
        x1, cfg,
        [&](const GridFunction& x, double alpha, double theta, std::int64_t) {
            const GridFunction jx = duality_map(x, ctx);
            return duality_map_inverse(jx - alpha * A(x) - (alpha * theta) * jx, ctx);
        },
        detail::no_decoration, observer, "solve_zero");
}

/// x_{n+1} = x_n - alpha_n A x_n - alpha_n theta_n x_n, valid for p = 2 only.
inline SolveResult solve_zero_hilbert(const MonotoneOp& A, const GridFunction& x1, const SolveConfig& cfg,
                                      const IterateObserver& observer = {}) {
    if (cfg.ctx.p != 2.0) {
        throw InvalidArgument("solve_zero_hilbert requires p = 2, got p = " + std::to_string(cfg.ctx.p));
    }
    return detail::iterate_single(
        x1, cfg,
        [&](const GridFunction& x, double alpha, double theta, std::int64_t) {
            return x - alpha * A(x) - (alpha * theta) * x;
        },
        detail::no_decoration, observer, "solve_zero_hilbert");
}

/// Subgradient form: A replaced by a selection phi_n from the subdifferential.
inline SolveResult solve_min(const MonotoneOp& subgrad, const GridFunction& x1, const SolveConfig& cfg,
                             const IterateObserver& observer = {}) {
    return solve_zero(subgrad, x1, cfg, observer);
}

/// Variational inequality over a box: A = T + beta_n with beta_n in N_C(x_n).
/// The trace records how far each iterate lies outside the box.
inline SolveResult solve_vi(const MonotoneOp& T, const Box& box, const GridFunction& x1, const SolveConfig& cfg,
                            double cone_magnitude = 1.0, const IterateObserver& observer = {}) {
    const LpContext& ctx = cfg.ctx;
    return detail::iterate_single(
        x1, cfg,
        [&](const GridFunction& x, double alpha, double theta, std::int64_t) {
            const GridFunction beta = vi_normal_cone_selection(x, box, cone_magnitude);
            const GridFunction jx = duality_map(x, ctx);
            return duality_map_inverse(jx - alpha * (T(x) + beta) - (alpha * theta) * jx, ctx);
        },
        [&](TraceRow& row, const GridFunction& next) { row.violation = box_violation(next, box); },
        observer, "solve_vi");
}

/// J-fixed points of T : E -> E*, i.e. zeros of A = J - T:
///
///     x_{n+1} = J^{-1}[(1 - alpha_n) J x_n + alpha_n T x_n - alpha_n theta_n J x_n].
inline SolveResult solve_jfixed(const MonotoneOp& T, const GridFunction& x1, const SolveConfig& cfg,
                                const IterateObserver& observer = {}) {
    const LpContext& ctx = cfg.ctx;
    return detail::iterate_single(
        x1, cfg,
        [&](const GridFunction& x, double alpha, double theta, std::int64_t) {
            const GridFunction jx = duality_map(x, ctx);
            return duality_map_inverse((1.0 - alpha) * jx + alpha * T(x) - (alpha * theta) * jx, ctx);
        },
        detail::no_decoration, observer, "solve_jfixed");
}

/// Coupled recursion for u + KFu = 0 with u in L_p and v in L_q:
///
///     u_{n+1} = J_p^{-1}(J_p u_n - alpha_n (F u_n - v_n) - alpha_n theta_n J_p u_n)
///     v_{n+1} = J_q^{-1}(J_q v_n - alpha_n (K v_n + u_n) - alpha_n theta_n J_q v_n)
///
/// Stops once ||u_n - u_{n-1}||_p < tol and ||v_n - v_{n-1}||_q < tol.
inline HammersteinResult solve_hammerstein(const HammersteinPair& pair, const GridFunction& u1,
                                           const GridFunction& v1, const SolveConfig& cfg,
                                           const PairObserver& observer = {}) {
    cfg.validate();
    const LpContext& ctx = cfg.ctx;
    require_same_grid(u1, ctx.zero());
    require_same_grid(v1, ctx.zero());
    const auto start = std::chrono::steady_clock::now();
    GridFunction u = u1;
    GridFunction v = v1;
    IterationTrace trace;
    for (std::int64_t n = 1; n <= cfg.max_iter; ++n) {
        const double alpha = cfg.schedule.alpha(n);
        const double theta = cfg.schedule.theta(n);
        const GridFunction ju = duality_map(u, ctx);
        const GridFunction jv = duality_map_inverse(v, ctx);  // J of L_q
        GridFunction u_next = duality_map_inverse(ju - alpha * (pair.F(u) - v) - (alpha * theta) * ju, ctx);
        GridFunction v_next = duality_map(jv - alpha * (pair.K(v) + u) - (alpha * theta) * jv, ctx);

        TraceRow row;
        row.n = n + 1;
        row.residual = lp_norm(u_next - u, ctx.p);
        row.residual_q = lp_norm(v_next - v, ctx.q);
        row.iterate_norm = lp_norm(u_next, ctx.p);
        row.iterate_norm_q = lp_norm(v_next, ctx.q);
        detail::guard_iterate(u_next, row.iterate_norm, cfg.divergence_guard, row.n, "solve_hammerstein u");
        detail::guard_iterate(v_next, *row.iterate_norm_q, cfg.divergence_guard, row.n, "solve_hammerstein v");
        if (cfg.target) row.phi_to_target = lyapunov_phi(*cfg.target, u_next, ctx);
        row.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        trace.rows.push_back(row);

        u = std::move(u_next);
        v = std::move(v_next);
        if (observer) observer(row.n, u, v);
        if (row.residual < cfg.tol && *row.residual_q < cfg.tol) {
            trace.converged = true;
            break;
        }
    }
    trace.hit_max_iter = !trace.converged;
    return {std::move(u), std::move(v), std::move(trace)};
}

/// The same system written on E = L_p x L_q:
///
///     w_{n+1} = J_E^{-1}(J_E w_n - alpha_n A w_n - alpha_n theta_n J_E w_n),
///
/// with the product duality map [J_p, J_q]. Same stopping rule as
/// solve_hammerstein.
inline ProductResult solve_product_zero(const ProductOp& A, const ProductPoint& z1, const SolveConfig& cfg,
                                        const PairObserver& observer = {}) {
    cfg.validate();
    const LpContext& ctx = cfg.ctx;
    require_same_grid(z1.u, ctx.zero());
    const auto start = std::chrono::steady_clock::now();
    ProductPoint z = z1;
    IterationTrace trace;
    for (std::int64_t n = 1; n <= cfg.max_iter; ++n) {
        const double alpha = cfg.schedule.alpha(n);
        const double theta = cfg.schedule.theta(n);
        const ProductPoint jz = product_duality(z, ctx);
        ProductPoint next = product_duality_inverse(jz - alpha * A(z) - (alpha * theta) * jz, ctx);

        TraceRow row;
        row.n = n + 1;
        const ProductPoint diff = next - z;
        row.residual = lp_norm(diff.u, ctx.p);
        row.residual_q = lp_norm(diff.v, ctx.q);
        row.iterate_norm = lp_norm(next.u, ctx.p);
        row.iterate_norm_q = lp_norm(next.v, ctx.q);
        detail::guard_iterate(next.u, product_norm(next, ctx), cfg.divergence_guard, row.n, "solve_product_zero");
        detail::guard_iterate(next.v, product_norm(next, ctx), cfg.divergence_guard, row.n, "solve_product_zero");
        if (cfg.target) row.phi_to_target = lyapunov_phi(*cfg.target, next.u, ctx);
        row.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        trace.rows.push_back(row);

        z = std::move(next);
        if (observer) observer(row.n, z.u, z.v);
        if (row.residual < cfg.tol && *row.residual_q < cfg.tol) {
            trace.converged = true;
            break;
        }
    }
    trace.hit_max_iter = !trace.converged;
    return {std::move(z), std::move(trace)};
}

/// ||theta J y + A y||_q: how nearly y solves the regularized equation
/// theta J y + A y = 0 that defines the comparison path.
inline double regularization_path_residual(const MonotoneOp& A, const GridFunction& y, double theta,
                                           const LpContext& ctx) {
    if (!(theta > 0.0)) throw InvalidArgument("theta must be > 0, got " + std::to_string(theta));
    return lp_norm(theta * duality_map(y, ctx) + A(y), ctx.q);
}

} // namespace lpmono
