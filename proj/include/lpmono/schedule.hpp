#pragma once

/*
 * Step sizes alpha_n and regularization weights theta_n for the iteration,
 * together with the block indices n(i) = i^i used to check that the pair is
 * acceptably paired:
 *
 *   S1(i) = sum_{j=n(i)}^{n(i+1)} alpha_j^2                         -> 0
 *   S2(i) = theta_{n(i)} * sum_{j=n(i)}^{n(i+1)} alpha_j             bounded away from 0
 *   S3(i) = (theta_{n(i)} - theta_{n(i+1)}) * sum alpha_j            -> 0
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "lpmono/error.hpp"

namespace lpmono {

// Serializable description of how a schedule was built.
struct ScheduleInfo {
    std::string name = "custom";
    double gamma = 1.0;
    std::int64_t theta_offset = 0;
    double log_base = 0.0;  // 0 when no logarithm is involved
    std::string alpha_rule;
    std::string theta_rule;
};

struct ParamSchedule {
    std::function<double(std::int64_t)> alpha;
    std::function<double(std::int64_t)> theta;
    double gamma = 1.0;
    ScheduleInfo info;

    // n(i) = i^i; throws OverflowError when it does not fit in 64 bits.
    static std::int64_t block(int i) {
        if (i < 1) throw InvalidArgument("block index must be >= 1, got " + std::to_string(i));
        std::int64_t result = 1;
        for (int k = 0; k < i; ++k) {
            if (result > std::numeric_limits<std::int64_t>::max() / i) {
                throw OverflowError("block(" + std::to_string(i) + ") = i^i overflows 64-bit integers");
            }
            result *= i;
        }
        return result;
    }
};

/// Schedule built from arbitrary rules (no clipping, no validation).
inline ParamSchedule make_schedule(std::function<double(std::int64_t)> alpha,
                                   std::function<double(std::int64_t)> theta, double gamma,
                                   std::string name) {
    ParamSchedule s{std::move(alpha), std::move(theta), gamma, {}};
    s.info.name = std::move(name);
    s.info.gamma = gamma;
    return s;
}

/// alpha_n = min(1/(n+1), gamma*theta_n), theta_n = 1/log_b(log_b(n + offset)).
///
/// The offset keeps theta_n in (0,1) and decreasing from n = 1; with natural
/// logarithms the smallest admissible offset is ceil(e^e) = 16.
inline ParamSchedule default_schedule(double gamma = 1.0, std::int64_t theta_offset = 16,
                                      double log_base = std::exp(1.0)) {
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be > 0, got " + std::to_string(gamma));
    if (!(log_base > 1.0)) throw InvalidArgument("log base must be > 1, got " + std::to_string(log_base));
    if (theta_offset < 0) throw InvalidArgument("theta offset must be >= 0");

    const double ln_base = std::log(log_base);
    auto theta = [theta_offset, ln_base](std::int64_t n) {
        const double inner = std::log(static_cast<double>(n + theta_offset)) / ln_base;
        return 1.0 / (std::log(inner) / ln_base);
    };
    const double theta1 = theta(1);
    if (!(theta1 > 0.0 && theta1 < 1.0)) {
        throw InvalidArgument("theta offset " + std::to_string(theta_offset) +
                              " leaves theta_1 = " + std::to_string(theta1) + " outside (0,1)");
    }
    auto alpha = [theta, gamma](std::int64_t n) {
        return std::min(1.0 / static_cast<double>(n + 1), gamma * theta(n));
    };

    ParamSchedule s{alpha, theta, gamma, {}};
    s.info = ScheduleInfo{"default", gamma, theta_offset, log_base, "min(1/(n+1), gamma*theta_n)",
                          "1/log_b(log_b(n + offset))"};
    return s;
}

struct PrefixCheck {
    bool theta_nonincreasing = true;
    bool theta_shrinks = true;          // theta_N < theta_1
    bool alpha_below_gamma_theta = true;
    bool in_unit_interval = true;

    bool ok() const {
        return theta_nonincreasing && theta_shrinks && alpha_below_gamma_theta && in_unit_interval;
    }
};

// Checks the schedule invariants on n = 1..N.
inline PrefixCheck check_prefix(const ParamSchedule& s, std::int64_t N) {
    PrefixCheck c;
    double prev_theta = s.theta(1);
    for (std::int64_t n = 1; n <= N; ++n) {
        const double a = s.alpha(n);
        const double th = s.theta(n);
        if (n > 1 && th > prev_theta) c.theta_nonincreasing = false;
        if (a > s.gamma * th) c.alpha_below_gamma_theta = false;
        if (!(a > 0.0 && a < 1.0 && th > 0.0 && th < 1.0)) c.in_unit_interval = false;
        prev_theta = th;
    }
    c.theta_shrinks = N > 1 && s.theta(N) < s.theta(1);
    return c;
}

struct BlockStats {
    int i = 0;
    std::int64_t start = 0;  // n(i)
    std::int64_t end = 0;    // n(i+1)
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
};

struct AcceptablyPairedReport {
    std::vector<BlockStats> blocks;  // i = 2..i_max
    double s2_floor = 0.1;
    bool s1_decreasing = false;      // strictly, toward 0
    bool s2_bounded_below = false;   // every S2(i) >= s2_floor
    bool s3_decreasing = false;      // strictly, toward 0

    bool ok() const { return s1_decreasing && s2_bounded_below && s3_decreasing; }
};

/// Block statistics S1..S3 for i = 2..i_max, summing j over [n(i), n(i+1)].
///
/// Cost is linear in n(i_max + 1); i_max = 6 sums about 8e5 terms.
inline AcceptablyPairedReport check_acceptably_paired(const ParamSchedule& s, int i_max,
                                                      double s2_floor = 0.1) {
    if (i_max < 2) throw InvalidArgument("i_max must be >= 2, got " + std::to_string(i_max));
    if (i_max > 12) {
        throw OverflowError("i_max = " + std::to_string(i_max) + " exceeds 12; n(i_max+1) is not summable");
    }
    AcceptablyPairedReport report;
    report.s2_floor = s2_floor;
    for (int i = 2; i <= i_max; ++i) {
        BlockStats b;
        b.i = i;
        b.start = ParamSchedule::block(i);
        b.end = ParamSchedule::block(i + 1);
        double sum_sq = 0.0, sum_sq_c = 0.0;
        double sum = 0.0, sum_c = 0.0;
        // Kahan summation; blocks reach millions of terms.
        for (std::int64_t j = b.start; j <= b.end; ++j) {
            const double a = s.alpha(j);
            double y = a * a - sum_sq_c;
            double t = sum_sq + y;
            sum_sq_c = (t - sum_sq) - y;
            sum_sq = t;
            y = a - sum_c;
            t = sum + y;
            sum_c = (t - sum) - y;
            sum = t;
        }
        const double th_start = s.theta(b.start);
        const double th_end = s.theta(b.end);
        b.s1 = sum_sq;
        b.s2 = th_start * sum;
        b.s3 = (th_start - th_end) * sum;
        report.blocks.push_back(b);
    }

    report.s1_decreasing = report.s3_decreasing = true;
    report.s2_bounded_below = true;
    for (std::size_t k = 0; k < report.blocks.size(); ++k) {
        const auto& b = report.blocks[k];
        if (b.s2 < s2_floor) report.s2_bounded_below = false;
        if (k == 0) continue;
        const auto& prev = report.blocks[k - 1];
        if (!(b.s1 < prev.s1)) report.s1_decreasing = false;
        if (!(b.s3 < prev.s3)) report.s3_decreasing = false;
    }
    return report;
}

} // namespace lpmono
