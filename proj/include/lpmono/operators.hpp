#pragma once

// Monotone operators on grid functions and the catalog used by the
// experiments: multiplication by (1+t), the norm subgradient, Hammerstein
// pairs, the product-space operator, box normal cones and J-pseudocontractive
// duals.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lpmono/duality.hpp"
#include "lpmono/error.hpp"
#include "lpmono/grid.hpp"
#include "lpmono/sampling.hpp"

namespace lpmono {

/// Single-valued operator E -> E*. Also used for maps into the dual that are
/// not monotone themselves (J-pseudocontractive T).
struct MonotoneOp {
    std::string name;
    std::function<GridFunction(const GridFunction&)> apply;
    std::optional<double> bounded_hint;  // bound on ||Ax|| over the test ball
    std::string warning;                 // set when a sampled check failed

    GridFunction operator()(const GridFunction& x) const { return apply(x); }
};

struct MonotonicityReport {
    std::size_t samples = 0;
    double worst = 0.0;  // smallest <Ax - Ay, x - y> seen
    bool passed = true;
};

/// Samples <Ax - Ay, x - y> over random smooth pairs with sup-norm <= magnitude.
inline MonotonicityReport check_monotone(const MonotoneOp& op, std::size_t M, std::size_t samples = 100,
                                         std::uint64_t seed = 7, double magnitude = 10.0,
                                         double slack = 1e-10) {
    std::mt19937_64 rng(seed);
    MonotonicityReport r;
    r.samples = samples;
    r.worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples; ++k) {
        const GridFunction x = random_smooth(M, rng, magnitude);
        const GridFunction y = random_smooth(M, rng, magnitude);
        const double v = pairing(op(x) - op(y), x - y);
        r.worst = std::min(r.worst, v);
        if (v < -slack) r.passed = false;
    }
    return r;
}

inline MonotoneOp mult_op() {
    return {"mult", [](const GridFunction& f) { return f.map([](double x, double t) { return (1.0 + t) * x; }); },
            std::nullopt, {}};
}

inline MonotoneOp identity_op() {
    return {"identity", [](const GridFunction& f) { return f; }, std::nullopt, {}};
}

inline MonotoneOp zero_op() {
    return {"zero", [](const GridFunction& f) { return GridFunction::zero(f.subintervals()); }, std::nullopt, {}};
}

enum class SubgradientVariant {
    scaled,  // x / ||x||_p
    duality,        // J(x) / ||x||_p
};

/// Selection from the subdifferential of ||.||_p; 0 at x = 0.
inline GridFunction norm_subgradient(const GridFunction& x, const LpContext& ctx,
                                     SubgradientVariant variant = SubgradientVariant::scaled) {
    const double norm = lp_norm(x, ctx.p);
    if (norm == 0.0) return GridFunction::zero(x.subintervals());
    if (variant == SubgradientVariant::duality) return (1.0 / norm) * duality_map(x, ctx);
    return (1.0 / norm) * x;
}

inline MonotoneOp norm_subgradient_op(const LpContext& ctx,
                                      SubgradientVariant variant = SubgradientVariant::scaled) {
    return {variant == SubgradientVariant::duality ? "norm-subgrad-duality" : "norm-subgrad",
            [ctx, variant](const GridFunction& x) { return norm_subgradient(x, ctx, variant); }, 1.0, {}};
}

/// F : X -> X* and K : X* -> X of the Hammerstein equation u + KFu = 0.
struct HammersteinPair {
    MonotoneOp F;
    MonotoneOp K;
};

/// (Fu)(t) = (1+t) u(t), K = identity. The unique solution is u* = 0.
inline HammersteinPair hammerstein_example() {
    MonotoneOp K = identity_op();
    return {mult_op(), K};
}

/// Samples k(t_i, s_j), row i holding s_0..s_M.
struct KernelMatrix {
    std::size_t M = 0;
    std::vector<double> entries;  // row-major, (M+1) x (M+1)

    static KernelMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.size() < 3) throw InvalidArgument("kernel needs at least 3 rows (M >= 2)");
        KernelMatrix k;
        k.M = rows.size() - 1;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) {
                throw InvalidArgument("kernel dimension mismatch: row " + std::to_string(i) + " has " +
                                      std::to_string(rows[i].size()) + " entries, expected " +
                                      std::to_string(rows.size()));
            }
            for (double v : rows[i]) {
                if (!std::isfinite(v)) throw NonFiniteError("kernel entry in row " + std::to_string(i) + " is not finite");
            }
            k.entries.insert(k.entries.end(), rows[i].begin(), rows[i].end());
        }
        return k;
    }

    static KernelMatrix sample(std::size_t M, const std::function<double(double, double)>& k) {
        std::vector<std::vector<double>> rows(M + 1, std::vector<double>(M + 1));
        for (std::size_t i = 0; i <= M; ++i) {
            for (std::size_t j = 0; j <= M; ++j) rows[i][j] = k(GridFunction::node(M, i), GridFunction::node(M, j));
        }
        return from_rows(rows);
    }

    double operator()(std::size_t i, std::size_t j) const { return entries[i * (M + 1) + j]; }
};

/// (Kv)(t_i) = trapezoid rule in s of k(t_i, s) v(s).
///
/// The operator carries a warning when the sampled monotonicity check fails
/// for the supplied kernel.
inline MonotoneOp hammerstein_kernel_op(KernelMatrix kernel) {
    const std::size_t M = kernel.M;
    MonotoneOp op{"kernel",
                  [kernel = std::move(kernel)](const GridFunction& v) {
                      if (v.subintervals() != kernel.M) {
                          throw GridMismatch("kernel is " + std::to_string(kernel.M + 1) + "x" +
                                             std::to_string(kernel.M + 1) + " but input has M = " +
                                             std::to_string(v.subintervals()));
                      }
                      const double h = 1.0 / static_cast<double>(kernel.M);
                      std::vector<double> out(kernel.M + 1);
                      for (std::size_t i = 0; i <= kernel.M; ++i) {
                          double s = 0.5 * (kernel(i, 0) * v[0] + kernel(i, kernel.M) * v[kernel.M]);
                          for (std::size_t j = 1; j < kernel.M; ++j) s += kernel(i, j) * v[j];
                          out[i] = s * h;
                      }
                      return GridFunction(std::move(out));
                  },
                  std::nullopt,
                  {}};
    const MonotonicityReport r = check_monotone(op, M);
    if (!r.passed) {
        op.warning = "kernel operator failed the sampled monotonicity check (worst pairing " +
                     std::to_string(r.worst) + ")";
    }
    return op;
}

using ProductOp = std::function<ProductPoint(const ProductPoint&)>;

/// A([u, v]) = [Fu - v, Kv + u]; zeros satisfy v = Fu and u + KFu = 0.
inline ProductOp product_op(const HammersteinPair& pair) {
    return [pair](const ProductPoint& z) { return ProductPoint{pair.F(z.u) - z.v, pair.K(z.v) + z.u}; };
}

struct Box {
    double lo = -1.0;
    double hi = 1.0;
};

/// Element of the normal cone of the box at x: +magnitude where the upper
/// bound is active, -magnitude where the lower bound is active, 0 elsewhere.
inline GridFunction vi_normal_cone_selection(const GridFunction& x, const Box& box, double magnitude = 1.0) {
    constexpr double kActive = 1e-12;
    if (!(box.lo < box.hi)) throw InvalidArgument("box needs lo < hi");
    return x.map([&](double v, double t) {
        if (v > box.hi + kActive || v < box.lo - kActive) {
            throw InfeasiblePoint("x(" + std::to_string(t) + ") = " + std::to_string(v) + " lies outside [" +
                                  std::to_string(box.lo) + ", " + std::to_string(box.hi) + "]");
        }
        if (v >= box.hi - kActive) return magnitude;
        if (v <= box.lo + kActive) return -magnitude;
        return 0.0;
    });
}

/// Largest distance of any node of x outside the box.
inline double box_violation(const GridFunction& x, const Box& box) {
    double worst = 0.0;
    for (double v : x.values()) worst = std::max({worst, v - box.hi, box.lo - v});
    return worst;
}

/// T = J - A. A is monotone iff T is J-pseudocontractive, and the J-fixed
/// points of T are the zeros of A.
inline MonotoneOp j_pseudo_from_monotone(MonotoneOp A, const LpContext& ctx) {
    std::string name = A.name + "-as-T";
    return {std::move(name), [A = std::move(A), ctx](const GridFunction& x) { return duality_map(x, ctx) - A(x); },
            std::nullopt, {}};
}

} // namespace lpmono
