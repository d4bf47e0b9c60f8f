#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "fts/core.hpp"
#include "fts/errors.hpp"
#include "fts/normal.hpp"
#include "fts/spectral.hpp"

namespace fts {

/// How the bias estimate enters m_hat. `scaled` adds (N/T) B_hat, `literal` adds B_hat unscaled.
enum class BiasMode { scaled, literal };

[[nodiscard]] inline std::string_view to_string(BiasMode mode) noexcept {
    return mode == BiasMode::scaled ? "scaled" : "literal";
}

[[nodiscard]] inline BiasMode parse_bias_mode(std::string_view name) {
    if (name == "scaled") return BiasMode::scaled;
    if (name == "literal") return BiasMode::literal;
    throw InvalidArgument("unknown bias mode '" + std::string(name) + "' (expected scaled|literal)");
}

struct StatisticParts {
    double f1_hat = 0.0;
    double f2_hat = 0.0;
    double bias_hat = 0.0;
    double m_hat = 0.0;
    BiasMode bias_mode = BiasMode::scaled;
    BlockDesign design;
};

struct TestReport {
    StatisticParts parts;
    double var_h0_hat = 0.0;
    /// sqrt(T) m_hat / v_hat_H0
    double statistic = 0.0;
    double p_value = 0.0;
    double alpha = 0.0;
    double critical_value = 0.0;
    bool reject = false;
};

namespace detail {

struct BlockSums {
    double f1 = 0.0;
    double f2 = 0.0;
    double bias = 0.0;
    double var_h0 = 0.0;
};

inline void require_frequencies(const BlockDesign& design) {
    if (design.frequency_count() < 1) throw InvalidArgument("block length must be at least 2");
}

/// (1/M^2) sum_{j1,j2} |<D_j1, D_j2>|^2 at one frequency: HS norm of the
/// block-averaged periodogram. Uses the M x M Gram matrix or the G x G
/// averaged kernel, whichever is smaller; both give the same value.
inline double averaged_periodogram_norm(const LocalTransforms& tr, std::size_t k) {
    const auto m = static_cast<Eigen::Index>(tr.blocks());
    const auto g = static_cast<Eigen::Index>(tr.grid_size());
    Eigen::MatrixXcd d(g, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto col = tr.at(static_cast<std::size_t>(j) + 1, k);
        for (Eigen::Index i = 0; i < g; ++i) d(i, j) = col[static_cast<std::size_t>(i)];
    }
    const double squared = (m <= g) ? (d.adjoint() * d).squaredNorm() : (d * d.adjoint()).squaredNorm();
    const double gd = static_cast<double>(g);
    const double md = static_cast<double>(m);
    return squared / (gd * gd) / (md * md);
}

inline BlockSums block_sums(const LocalTransforms& tr, const BlockDesign& design) {
    require_frequencies(design);
    const std::size_t m = design.blocks();
    const std::size_t n = design.block_length();
    const std::size_t kmax = design.frequency_count();
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    BlockSums sums;
    for (std::size_t k = 1; k <= kmax; ++k) {
        double cross = 0.0;
        double bias = 0.0;
        for (std::size_t j = 1; j <= m; ++j) {
            const auto cur = tr.at(j, k);
            const auto prev = tr.at(j, k - 1);
            cross += hs_inner_periodograms(cur, prev);
            bias += l2_norm_squared(cur) * l2_norm_squared(prev);
        }
        sums.f1 += cross;
        sums.bias += bias;
        sums.var_h0 += (cross / md) * (cross / md);
        sums.f2 += averaged_periodogram_norm(tr, k);
    }
    sums.f1 /= static_cast<double>(design.length());
    sums.f2 /= nd;
    sums.bias /= nd * md;
    sums.var_h0 *= 16.0 * std::numbers::pi * std::numbers::pi / nd;
    return sums;
}

inline double combine(double f1, double f2, double bias, const BlockDesign& design, BiasMode mode) noexcept {
    const double factor = mode == BiasMode::scaled
                              ? static_cast<double>(design.block_length()) / static_cast<double>(design.length())
                              : 1.0;
    return 4.0 * std::numbers::pi * (f1 - f2 + factor * bias);
}

}  // namespace detail

/// (1/T) sum_{k=1}^{N/2} sum_j |<D^{u_j,w_k}, D^{u_j,w_{k-1}}>|^2
[[nodiscard]] inline double f1_hat(const FunctionalTimeSeries& series, const BlockDesign& design) {
    return detail::block_sums(LocalTransforms(series, design), design).f1;
}

/// (1/N) sum_{k=1}^{N/2} || (1/M) sum_j I^{u_j,w_k} ||_HS^2
[[nodiscard]] inline double f2_hat(const FunctionalTimeSeries& series, const BlockDesign& design) {
    return detail::block_sums(LocalTransforms(series, design), design).f2;
}

/// (1/(NM)) sum_{k=1}^{N/2} sum_j ||D^{u_j,w_k}||^2 ||D^{u_j,w_{k-1}}||^2
[[nodiscard]] inline double bias_hat(const FunctionalTimeSeries& series, const BlockDesign& design) {
    return detail::block_sums(LocalTransforms(series, design), design).bias;
}

/// Null-variance estimate (16 pi^2 / N) sum_k [ (1/M) sum_j <I_{j,k}, I_{j,k-1}>_HS ]^2.
[[nodiscard]] inline double var_h0_hat(const FunctionalTimeSeries& series, const BlockDesign& design) {
    return detail::block_sums(LocalTransforms(series, design), design).var_h0;
}

/// m_hat = 4 pi (F1 - F2 + c B) with c = N/T (scaled) or 1 (literal). May be negative.
[[nodiscard]] inline StatisticParts m_hat(const FunctionalTimeSeries& series, const BlockDesign& design,
                                         BiasMode mode = BiasMode::scaled) {
    const auto sums = detail::block_sums(LocalTransforms(series, design), design);
    return {sums.f1, sums.f2, sums.bias, detail::combine(sums.f1, sums.f2, sums.bias, design, mode), mode, design};
}

/// Parts and null-variance estimate from a single pass over the block transforms.
struct Evaluation {
    StatisticParts parts;
    double var_h0_hat = 0.0;
};

[[nodiscard]] inline Evaluation evaluate(const FunctionalTimeSeries& series, const BlockDesign& design,
                                         BiasMode mode = BiasMode::scaled) {
    const auto sums = detail::block_sums(LocalTransforms(series, design), design);
    return {{sums.f1, sums.f2, sums.bias, detail::combine(sums.f1, sums.f2, sums.bias, design, mode), mode, design},
            sums.var_h0};
}

/**
 * True when v_hat_H0^2 is zero up to rounding relative to the series' scale
 * (v^2 is homogeneous of degree 8, so it is compared with the squared mean
 * square norm to the fourth power).
 */
[[nodiscard]] inline bool degenerate_variance(double var_h0, const FunctionalTimeSeries& series) {
    double energy = 0.0;
    for (double v : series.values()) energy += v * v;
    energy /= static_cast<double>(series.values().size());
    const double e2 = energy * energy;
    return !(var_h0 > 1e-24 * e2 * e2);
}

/**
 * @brief Stationarity test: reject when sqrt(T) m_hat / v_hat_H0 > u_{1-alpha}.
 *
 * @throws DegenerateInputError when v_hat_H0^2 vanishes (e.g. a constant series).
 */
[[nodiscard]] inline TestReport run_test(const FunctionalTimeSeries& series, const BlockDesign& design, double alpha,
                                         BiasMode mode = BiasMode::scaled) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0,1)");
    const auto [parts, var_h0] = evaluate(series, design, mode);
    if (degenerate_variance(var_h0, series)) {
        throw DegenerateInputError("null-variance estimate is zero; the series has no usable second-order structure");
    }
    const double statistic = std::sqrt(static_cast<double>(design.length())) * parts.m_hat / std::sqrt(var_h0);
    const double critical = normal::quantile(1.0 - alpha);
    TestReport report{.parts = parts,
                      .var_h0_hat = var_h0,
                      .statistic = statistic,
                      .p_value = normal::survival(statistic),
                      .alpha = alpha,
                      .critical_value = critical,
                      .reject = statistic > critical};
    return report;
}

/// Approximate type-II error Phi((nu_H0/nu) u_{1-alpha} - sqrt(T) m^2 / nu).
[[nodiscard]] inline double power_approx(double m_sq, double nu, double nu_h0, std::size_t length, double alpha) {
    if (m_sq < 0.0 || !(nu > 0.0) || !(nu_h0 > 0.0)) throw InvalidArgument("power_approx: need m^2 >= 0, nu > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0,1)");
    return normal::cdf((nu_h0 / nu) * normal::quantile(1.0 - alpha) -
                       std::sqrt(static_cast<double>(length)) * m_sq / nu);
}

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Asymptotic (1-alpha) interval for m^2; the lower end is clamped at zero. `nu_h1` is caller-supplied.
[[nodiscard]] inline Interval confidence_interval(double m_hat_value, double nu_h1, std::size_t length, double alpha) {
    if (!(nu_h1 > 0.0)) throw InvalidArgument("confidence_interval: nu must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0,1)");
    const double half = nu_h1 * normal::quantile(1.0 - alpha / 2.0) / std::sqrt(static_cast<double>(length));
    return {std::max(0.0, m_hat_value - half), m_hat_value + half};
}

struct RelevantDecision {
    bool reject = false;
    /// sqrt(T) (m_hat - delta) / nu
    double margin = 0.0;
    /// u_alpha
    double critical_value = 0.0;
};

/// Test of H: m^2 >= delta against m^2 < delta ("approximately stationary").
[[nodiscard]] inline RelevantDecision relevant_test(double m_hat_value, double nu_h1, std::size_t length,
                                                    double delta, double alpha) {
    if (!(nu_h1 > 0.0) || !(delta > 0.0)) throw InvalidArgument("relevant_test: nu and delta must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0,1)");
    RelevantDecision out;
    out.margin = std::sqrt(static_cast<double>(length)) * (m_hat_value - delta) / nu_h1;
    out.critical_value = normal::quantile(alpha);
    out.reject = out.margin < out.critical_value;
    return out;
}

enum class BlockRule { divisor, ceil };

struct BlockSuggestion {
    std::size_t blocks = 0;
    std::size_t block_length = 0;
    /// M*N; smaller than T when the head of the series must be dropped.
    std::size_t usable_length = 0;
};

/// Smallest integer c with c^3 >= t.
[[nodiscard]] inline std::size_t integer_cbrt_ceil(std::size_t t) noexcept {
    auto c = static_cast<std::size_t>(std::llround(std::cbrt(static_cast<double>(t))));
    while (c > 0 && (c - 1) * (c - 1) * (c - 1) >= t) --c;
    while (c * c * c < t) ++c;
    return c;
}

/**
 * Block count near T^{1/3}. `divisor`: the divisor M of T with T/M even that
 * is nearest to T^{1/3} (ties toward smaller M). `ceil`: M = ceil(T^{1/3}) and
 * N the largest even number with M N <= T.
 */
[[nodiscard]] inline BlockSuggestion suggest_blocks(std::size_t length, BlockRule rule = BlockRule::divisor) {
    if (length < 8) throw InvalidArgument("block suggestion needs T >= 8");
    if (rule == BlockRule::ceil) {
        const std::size_t m = integer_cbrt_ceil(length);
        const std::size_t n = 2 * (length / (2 * m));
        if (n == 0) throw DesignError("no even block length fits", 0);
        return {m, n, m * n};
    }
    const double target = std::cbrt(static_cast<double>(length));
    std::size_t best = 0;
    double best_dist = 0.0;
    for (std::size_t m = 1; m <= length; ++m) {
        if (length % m != 0 || (length / m) % 2 != 0) continue;
        const double dist = std::abs(static_cast<double>(m) - target);
        if (best == 0 || dist < best_dist) {
            best = m;
            best_dist = dist;
        }
    }
    if (best == 0) {
        throw DesignError("T=" + std::to_string(length) +
                              " has no divisor leaving an even block length; truncate the series first",
                          0);
    }
    return {best, length / best, length};
}

}  // namespace fts
