#pragma once

// Random smooth grid functions for sampled property checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "lpmono/grid.hpp"

namespace lpmono {

/// Random trigonometric polynomial of degree <= 4 with sup-norm at most
/// `magnitude`.
inline GridFunction random_smooth(std::size_t M, std::mt19937_64& rng, double magnitude = 10.0) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_real_distribution<double> scale(0.05, 1.0);
    constexpr int kDegree = 4;
    std::vector<double> a(kDegree + 1), b(kDegree + 1);
    for (int k = 0; k <= kDegree; ++k) {
        a[k] = coeff(rng);
        b[k] = coeff(rng);
    }
    GridFunction raw = GridFunction::sample(M, [&](double t) {
        double s = 0.0;
        for (int k = 0; k <= kDegree; ++k) {
            s += a[k] * std::cos(k * std::numbers::pi * t) + b[k] * std::sin(k * std::numbers::pi * t);
        }
        return s;
    });
    double sup = 0.0;
    for (double x : raw.values()) sup = std::max(sup, std::abs(x));
    if (sup == 0.0) return raw;
    return (magnitude * scale(rng) / sup) * raw;
}

} // namespace lpmono
