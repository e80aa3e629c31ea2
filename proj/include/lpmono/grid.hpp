#pragma once

/*
 * Real functions on [0,1] sampled at the uniform nodes t_i = i/M, i = 0..M.
 *
 * Norms and pairings use trapezoid weights, so the discrete space is a
 * weighted l_p space:
 *
 *     <f, g>  = sum_i w_i f_i g_i,         w_0 = w_M = 1/(2M), w_i = 1/M
 *     ||f||_r = (sum_i w_i |f_i|^r)^(1/r)
 *
 * With this choice every duality identity in duality.hpp holds exactly (up to
 * rounding) in the discrete norms.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lpmono/error.hpp"

namespace lpmono {

class GridFunction {
public:
    GridFunction() = default;

    // Samples `values`; the subinterval count is values.size() - 1.
    explicit GridFunction(std::vector<double> values) : values_(std::move(values)) {
        if (values_.size() < 3) {
            throw InvalidArgument("GridFunction needs M >= 2 (at least 3 samples), got " +
                                  std::to_string(values_.size()) + " samples");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw NonFiniteError("GridFunction sample " + std::to_string(i) + " is not finite");
            }
        }
    }

    static GridFunction constant(std::size_t M, double c) {
        return GridFunction(std::vector<double>(M + 1, c));
    }

    static GridFunction zero(std::size_t M) { return constant(M, 0.0); }

    // Samples rule(t_i) on the M-subinterval grid.
    static GridFunction sample(std::size_t M, const std::function<double(double)>& rule) {
        if (M < 2) throw InvalidArgument("grid needs M >= 2, got " + std::to_string(M));
        std::vector<double> v(M + 1);
        for (std::size_t i = 0; i <= M; ++i) v[i] = rule(node(M, i));
        return GridFunction(std::move(v));
    }

    static double node(std::size_t M, std::size_t i) {
        return static_cast<double>(i) / static_cast<double>(M);
    }

    std::size_t subintervals() const noexcept { return values_.empty() ? 0 : values_.size() - 1; }
    std::size_t size() const noexcept { return values_.size(); }
    double node(std::size_t i) const { return node(subintervals(), i); }

    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
    }

    bool is_zero() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
    }

    // Nodewise map; the result is not checked for finiteness (callers that
    // need the invariant check all_finite()).
    template <typename Fn>
    GridFunction map(Fn&& fn) const {
        GridFunction out;
        out.values_.resize(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = fn(values_[i], node(i));
        return out;
    }

    template <typename Fn>
    GridFunction zip(const GridFunction& other, Fn&& fn) const {
        require_same_grid(*this, other);
        GridFunction out;
        out.values_.resize(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) {
            out.values_[i] = fn(values_[i], other.values_[i]);
        }
        return out;
    }

    friend void require_same_grid(const GridFunction& a, const GridFunction& b) {
        if (a.values_.size() != b.values_.size()) {
            throw GridMismatch("grid mismatch: M = " + std::to_string(a.subintervals()) + " vs M = " +
                               std::to_string(b.subintervals()));
        }
    }

    friend GridFunction operator+(const GridFunction& a, const GridFunction& b) {
        return a.zip(b, [](double x, double y) { return x + y; });
    }
    friend GridFunction operator-(const GridFunction& a, const GridFunction& b) {
        return a.zip(b, [](double x, double y) { return x - y; });
    }
    friend GridFunction operator-(const GridFunction& a) {
        return a.map([](double x, double) { return -x; });
    }
    friend GridFunction operator*(double c, const GridFunction& a) {
        return a.map([c](double x, double) { return c * x; });
    }
    friend GridFunction operator*(const GridFunction& a, double c) { return c * a; }

    friend bool operator==(const GridFunction&, const GridFunction&) = default;

private:
    std::vector<double> values_;
};

// Nodewise product f(t_i) g(t_i).
inline GridFunction hadamard(const GridFunction& f, const GridFunction& g) {
    return f.zip(g, [](double x, double y) { return x * y; });
}

inline double max_abs_diff(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f, g);
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
    return m;
}

enum class DualityFormula {
    standard,  // ||f||^(2-p) |f|^(p-2) f
    swapped,   // ||f||^(p-2) f |f|^(2-p), kept for sensitivity runs only
};

// Exponent pair and grid geometry for L_p([0,1]), 1 < p <= 2.
struct LpContext {
    double p = 1.5;
    double q = 3.0;
    std::size_t M = 100;
    double lipschitz_L = 2.0;
    DualityFormula formula = DualityFormula::standard;

    static LpContext make(double p, std::size_t M = 100,
                          DualityFormula formula = DualityFormula::standard) {
        if (!(p > 1.0 && p <= 2.0)) {
            throw InvalidArgument("exponent p must lie in (1, 2], got " + std::to_string(p));
        }
        if (M < 2) throw InvalidArgument("grid needs M >= 2, got " + std::to_string(M));
        return LpContext{p, p / (p - 1.0), M, 1.0 / (p - 1.0), formula};
    }

    GridFunction sample(const std::function<double(double)>& rule) const {
        return GridFunction::sample(M, rule);
    }
    GridFunction zero() const { return GridFunction::zero(M); }
};

inline double trapezoid_integral(const GridFunction& f) {
    const std::size_t M = f.subintervals();
    if (M < 2) throw InvalidArgument("trapezoid_integral on an empty grid");
    double interior = 0.0;
    for (std::size_t i = 1; i < M; ++i) interior += f[i];
    return (0.5 * f[0] + interior + 0.5 * f[M]) / static_cast<double>(M);
}

inline double lp_norm(const GridFunction& f, double r) {
    if (!(r >= 1.0)) throw InvalidArgument("lp_norm exponent must be >= 1, got " + std::to_string(r));
    if (f.is_zero()) return 0.0;
    // Scale by the largest magnitude so |f|^r neither underflows nor overflows.
    double scale = 0.0;
    for (double x : f.values()) scale = std::max(scale, std::abs(x));
    const GridFunction powered = f.map([&](double x, double) { return std::pow(std::abs(x) / scale, r); });
    return scale * std::pow(trapezoid_integral(powered), 1.0 / r);
}

inline double pairing(const GridFunction& f, const GridFunction& g) {
    return trapezoid_integral(hadamard(f, g));
}

} // namespace lpmono
