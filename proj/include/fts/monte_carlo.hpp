#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fts/errors.hpp"
#include "fts/normal.hpp"
#include "fts/rng.hpp"
#include "fts/simulate.hpp"
#include "fts/stationarity.hpp"

namespace fts::sim {

/// Environment variable consulted for the worker count when none is configured.
inline constexpr const char* kWorkersEnv = "FTS_WORKERS";

struct McConfig {
    TvFarSpec model;
    std::size_t length = 128;
    std::size_t blocks = 8;
    std::size_t replications = 1000;
    std::vector<double> alphas{0.10, 0.05, 0.01};
    std::uint64_t seed = 1;
    /// 0: take FTS_WORKERS, else hardware concurrency.
    std::size_t workers = 0;
    BiasMode bias_mode = BiasMode::scaled;

    void validate() const {
        if (replications < 1) throw InvalidArgument("need at least one replication");
        for (double a : alphas) {
            if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("alphas must lie in (0,1)");
        }
        (void)make_design(length, blocks);
    }
};

struct RejectionRate {
    double alpha = 0.0;
    std::size_t rejections = 0;
    /// fraction in [0,1]
    double rate = 0.0;
    /// binomial Monte Carlo standard error of `rate`
    double std_error = 0.0;
};

struct RejectionTable {
    std::vector<RejectionRate> rows;
    std::size_t replications = 0;
    std::size_t failed = 0;
};

[[nodiscard]] inline std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv(kWorkersEnv)) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `body(r)` for r = 0..count-1 on `workers` threads with static contiguous chunks.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t r = 0; r < count; ++r) body(r);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = count * w / workers;
            const std::size_t end = count * (w + 1) / workers;
            try {
                for (std::size_t r = begin; r < end; ++r) body(r);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/**
 * @brief Standardized statistics sqrt(T) m_hat / v_hat_H0 for R replications.
 *
 * Replication r draws from CounterRng(seed, r), so the output is identical for
 * any worker count. Entries for replications that failed (divergent
 * recursion, degenerate variance) are empty; if at least 1% of replications
 * fail the run is aborted.
 */
[[nodiscard]] inline std::vector<std::optional<double>> replicate_statistics(const McConfig& config) {
    config.validate();
    const auto design = make_design(config.length, config.blocks);
    std::vector<std::optional<double>> stats(config.replications);
    std::vector<std::string> failures(config.replications);
    parallel_for(config.replications, resolve_workers(config.workers), [&](std::size_t r) {
        CounterRng rng(config.seed, static_cast<std::uint32_t>(r));
        try {
            const auto series = simulate(config.model, config.length, rng);
            const auto [parts, var] = evaluate(series, design, config.bias_mode);
            if (degenerate_variance(var, series)) throw DegenerateInputError("zero null-variance estimate");
            stats[r] = std::sqrt(static_cast<double>(config.length)) * parts.m_hat / std::sqrt(var);
        } catch (const Error& e) {
            failures[r] = e.what();
        }
    });
    const auto failed = static_cast<std::size_t>(std::count_if(stats.begin(), stats.end(), [](const auto& s) {
        return !s.has_value();
    }));
    if (failed > 0 && 100 * failed >= config.replications) {
        const auto first = std::find_if(failures.begin(), failures.end(), [](const auto& s) { return !s.empty(); });
        throw SimulationError(std::to_string(failed) + " of " + std::to_string(config.replications) +
                              " replications failed; first: " + *first);
    }
    return stats;
}

/// Empirical rejection rates of the stationarity test at each alpha.
[[nodiscard]] inline RejectionTable monte_carlo(const McConfig& config) {
    const auto stats = replicate_statistics(config);
    RejectionTable table;
    for (const auto& s : stats) {
        if (s) ++table.replications;
        else ++table.failed;
    }
    for (double alpha : config.alphas) {
        const double critical = normal::quantile(1.0 - alpha);
        RejectionRate row{alpha, 0, 0.0, 0.0};
        for (const auto& s : stats) {
            if (s && *s > critical) ++row.rejections;
        }
        const double n = static_cast<double>(table.replications);
        row.rate = static_cast<double>(row.rejections) / n;
        row.std_error = std::sqrt(row.rate * (1.0 - row.rate) / n);
        table.rows.push_back(row);
    }
    return table;
}

/// The standardized statistics themselves (failed replications dropped).
[[nodiscard]] inline std::vector<double> density_samples(const McConfig& config) {
    std::vector<double> out;
    for (const auto& s : replicate_statistics(config)) {
        if (s) out.push_back(*s);
    }
    return out;
}

/// sup_x |F_n(x) - Phi(x)| for the empirical CDF of `sample`.
[[nodiscard]] inline double ks_distance_to_normal(std::vector<double> sample) {
    if (sample.empty()) throw InvalidArgument("KS distance of an empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = normal::cdf(sample[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

}  // namespace fts::sim
