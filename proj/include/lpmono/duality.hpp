#pragma once

// Geometry of L_p, 1 < p <= 2: the normalized duality map and its inverse,
// the Lyapunov functional phi, the V functional, the product space
// E = L_p x L_q and the Xu constants (t_p, c_p).

#include <cmath>
#include <string>

#include "lpmono/error.hpp"
#include "lpmono/grid.hpp"

namespace lpmono {

namespace detail {

// ||f||_r^(2-r) |f|^(r-2) f written as ||f||_r^(2-r) |f|^(r-1) sign(f), so
// zero nodes map to zero without evaluating 0^(negative).
inline GridFunction normalized_duality(const GridFunction& f, double r) {
    const double norm = lp_norm(f, r);
    if (norm == 0.0) return GridFunction::zero(f.subintervals());
    const double scale = std::pow(norm, 2.0 - r);
    return f.map([&](double x, double) {
        if (x == 0.0) return 0.0;
        return std::copysign(scale * std::pow(std::abs(x), r - 1.0), x);
    });
}

// ||f||_r^(r-2) f |f|^(2-r), exponents swapped.
inline GridFunction swapped_duality(const GridFunction& f, double r) {
    const double norm = lp_norm(f, r);
    if (norm == 0.0) return GridFunction::zero(f.subintervals());
    const double scale = std::pow(norm, r - 2.0);
    return f.map([&](double x, double) {
        if (x == 0.0) return 0.0;
        return std::copysign(scale * std::pow(std::abs(x), 3.0 - r), x);
    });
}

} // namespace detail

/// Normalized duality map J : L_p -> L_q.
///
/// With the default formula, <f, Jf> = ||f||_p^2 = ||Jf||_q^2 in the discrete
/// norms. DualityFormula::swapped swaps the exponents and does not satisfy
/// these identities for non-constant f.
inline GridFunction duality_map(const GridFunction& f, const LpContext& ctx) {
    if (ctx.formula == DualityFormula::swapped) return detail::swapped_duality(f, ctx.p);
    return detail::normalized_duality(f, ctx.p);
}

/// Inverse J^{-1} : L_q -> L_p, equal to the duality map of L_q.
inline GridFunction duality_map_inverse(const GridFunction& g, const LpContext& ctx) {
    return detail::normalized_duality(g, ctx.q);
}

/// phi(x, y) = ||x||^2 - 2 <x, Jy> + ||y||^2.
inline double lyapunov_phi(const GridFunction& x, const GridFunction& y, const LpContext& ctx) {
    require_same_grid(x, y);
    const double nx = lp_norm(x, ctx.p);
    const double ny = lp_norm(y, ctx.p);
    return nx * nx - 2.0 * pairing(x, duality_map(y, ctx)) + ny * ny;
}

/// V(x, x*) = ||x||_p^2 - 2 <x, x*> + ||x*||_q^2.
inline double v_functional(const GridFunction& x, const GridFunction& xstar, const LpContext& ctx) {
    require_same_grid(x, xstar);
    const double nx = lp_norm(x, ctx.p);
    const double ns = lp_norm(xstar, ctx.q);
    return nx * nx - 2.0 * pairing(x, xstar) + ns * ns;
}

struct XuConstants {
    double t_p = 1.0;
    double c_p = 1.0;
};

// Root of (p-1) t^(p-1) + (p-1) t^(p-2) - 1 on (0, 1]. The left side is
// positive near 0, so a root exists in the bracket only when it is <= 0 at
// t = 1, i.e. for p <= 3/2.
inline XuConstants xu_constants(double p) {
    if (!(p > 1.0 && p <= 2.0)) {
        throw InvalidArgument("xu_constants needs 1 < p <= 2, got " + std::to_string(p));
    }
    const auto f = [p](double t) {
        return (p - 1.0) * std::pow(t, p - 1.0) + (p - 1.0) * std::pow(t, p - 2.0) - 1.0;
    };
    constexpr double kResidual = 1e-12;
    double lo = 1e-12;
    double hi = 1.0;
    const double f_hi = f(hi);
    if (std::abs(f_hi) <= kResidual) {
        return {hi, (1.0 + std::pow(hi, p - 1.0)) * std::pow(1.0 + hi, -(p - 1.0))};
    }
    if (!(f(lo) > 0.0 && f_hi < 0.0)) {
        throw NoRootError("xu_constants: no sign change on (1e-12, 1] for p = " + std::to_string(p));
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) break;
        (fm > 0.0 ? lo : hi) = mid;
        if (hi - lo <= 0.0) break;
    }
    if (std::abs(f(mid)) > kResidual) {
        throw NoRootError("xu_constants: bisection residual " + std::to_string(f(mid)) + " above 1e-12");
    }
    return {mid, (1.0 + std::pow(mid, p - 1.0)) * std::pow(1.0 + mid, -(p - 1.0))};
}

/// A point [u, v] of E = L_p x L_q.
struct ProductPoint {
    GridFunction u;  // primal component, L_p
    GridFunction v;  // dual component, L_q

    ProductPoint() = default;
    ProductPoint(GridFunction u_, GridFunction v_) : u(std::move(u_)), v(std::move(v_)) {
        require_same_grid(u, v);
    }

    friend ProductPoint operator+(const ProductPoint& a, const ProductPoint& b) {
        return {a.u + b.u, a.v + b.v};
    }
    friend ProductPoint operator-(const ProductPoint& a, const ProductPoint& b) {
        return {a.u - b.u, a.v - b.v};
    }
    friend ProductPoint operator*(double c, const ProductPoint& a) { return {c * a.u, c * a.v}; }
    friend bool operator==(const ProductPoint&, const ProductPoint&) = default;
};

/// (||u||_p^2 + ||v||_q^2)^(1/2).
inline double product_norm(const ProductPoint& z, const LpContext& ctx) {
    return std::hypot(lp_norm(z.u, ctx.p), lp_norm(z.v, ctx.q));
}

/// Norm of a point of E* = L_q x L_p.
inline double product_dual_norm(const ProductPoint& z, const LpContext& ctx) {
    return std::hypot(lp_norm(z.u, ctx.q), lp_norm(z.v, ctx.p));
}

/// Pairing of z in E with w in E*: <z.u, w.u> + <z.v, w.v>.
inline double product_pairing(const ProductPoint& z, const ProductPoint& w) {
    return pairing(z.u, w.u) + pairing(z.v, w.v);
}

/// J_E[u, v] = [J_p u, J_q v].
inline ProductPoint product_duality(const ProductPoint& z, const LpContext& ctx) {
    return {duality_map(z.u, ctx), duality_map_inverse(z.v, ctx)};
}

/// J_E^{-1}[a, b] = [J_q a, J_p b], mapping E* back to E.
inline ProductPoint product_duality_inverse(const ProductPoint& w, const LpContext& ctx) {
    return {duality_map_inverse(w.u, ctx), duality_map(w.v, ctx)};
}

} // namespace lpmono
