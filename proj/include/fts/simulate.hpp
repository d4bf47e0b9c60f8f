#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "fts/core.hpp"
#include "fts/errors.hpp"
#include "fts/rng.hpp"

namespace fts::sim {

/**
 * @brief Deterministic function of time used for norm schedules and innovation scales.
 *
 * Time enters through x = t / P, where P is `period` or the series length T
 * when `period` is 0.
 *   constant:        level
 *   harmonic_cosine: amplitude * cos(offset + a cos(2 pi c x) + b sin(2 pi c x))
 *   raised_cosine:   level + amplitude * cos(2 pi c x + offset)
 * with a = cos_weight, b = sin_weight, c = cycles.
 */
struct Profile {
    enum class Kind { constant, harmonic_cosine, raised_cosine };

    Kind kind = Kind::constant;
    double level = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    double cos_weight = 0.0;
    double sin_weight = 0.0;
    double cycles = 1.0;
    std::size_t period = 0;

    static Profile constant(double value) { return {.kind = Kind::constant, .level = value}; }

    [[nodiscard]] double at_fraction(double x) const noexcept {
        const double phase = 2.0 * std::numbers::pi * cycles * x;
        switch (kind) {
            case Kind::constant:
                return level;
            case Kind::harmonic_cosine:
                return amplitude * std::cos(offset + cos_weight * std::cos(phase) + sin_weight * std::sin(phase));
            case Kind::raised_cosine:
                return level + amplitude * std::cos(phase + offset);
        }
        return level;
    }

    [[nodiscard]] double at(std::size_t t, std::size_t length) const noexcept {
        const double denom = static_cast<double>(period != 0 ? period : length);
        return at_fraction(static_cast<double>(t) / denom);
    }

    /// Lower bound of the profile over all times.
    [[nodiscard]] double lower_bound() const noexcept {
        switch (kind) {
            case Kind::constant:
                return level;
            case Kind::raised_cosine:
                return level - std::abs(amplitude);
            case Kind::harmonic_cosine: {
                // argument sweeps offset +- r; cos attains its minimum at the end farthest from 2 pi n
                const double r = std::hypot(cos_weight, sin_weight);
                if (amplitude < 0.0) return -std::abs(amplitude);
                const double lo = offset - r;
                const double hi = offset + r;
                if (hi - lo >= 2.0 * std::numbers::pi) return -amplitude;
                const double k = std::ceil((lo - std::numbers::pi) / (2.0 * std::numbers::pi));
                if (std::numbers::pi + 2.0 * std::numbers::pi * k <= hi) return -amplitude;
                return amplitude * std::min(std::cos(lo), std::cos(hi));
            }
        }
        return level;
    }
};

/// Matrix norm that kappa prescribes for a drawn operator. `max_column_sum` is
/// the induced 1-norm max_l' sum_l |a(l,l')|.
enum class OperatorNorm { spectral, hilbert_schmidt, max_column_sum };

[[nodiscard]] inline double matrix_norm(const Eigen::MatrixXd& a, OperatorNorm kind) {
    switch (kind) {
        case OperatorNorm::hilbert_schmidt:
            return a.norm();
        case OperatorNorm::max_column_sum:
            return a.cwiseAbs().colwise().sum().maxCoeff();
        case OperatorNorm::spectral:
            break;
    }
    return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
}

[[nodiscard]] inline std::string_view to_string(OperatorNorm kind) noexcept {
    switch (kind) {
        case OperatorNorm::hilbert_schmidt:
            return "hilbert_schmidt";
        case OperatorNorm::max_column_sum:
            return "max_column_sum";
        case OperatorNorm::spectral:
            break;
    }
    return "spectral";
}

[[nodiscard]] inline OperatorNorm parse_operator_norm(std::string_view name) {
    if (name == "spectral") return OperatorNorm::spectral;
    if (name == "hilbert_schmidt") return OperatorNorm::hilbert_schmidt;
    if (name == "max_column_sum") return OperatorNorm::max_column_sum;
    throw InvalidArgument("unknown operator norm '" + std::string(name) +
                          "' (expected spectral|hilbert_schmidt|max_column_sum)");
}

/// Coefficient-variance matrix nu_{l,l'} and signed norm schedule kappa(t) for one lag.
struct LagSpec {
    Eigen::MatrixXd variances;
    Profile norm = Profile::constant(0.0);
};

struct Regime {
    std::vector<LagSpec> lags;
    /// Var(<eps_t, psi_l>), l = 1..L
    std::vector<double> innovation_variances;
    /// Multiplicative innovation variance s^2(t).
    Profile innovation_scale = Profile::constant(1.0);
};

/**
 * @brief Time-varying functional AR model in Fourier-coefficient space.
 *
 * Times t <= break_index(T) use `regime`, later times use `after_break`
 * (when present). Burn-in steps run the first regime with profiles evaluated
 * at t = 1, starting from zero.
 */
struct TvFarSpec {
    std::string name = "custom";
    std::size_t basis_dimension = 15;
    std::size_t grid_size = 100;
    std::size_t burn_in = 100;
    OperatorNorm operator_norm = OperatorNorm::spectral;
    Regime regime;
    std::optional<double> break_fraction;
    std::optional<Regime> after_break;

    [[nodiscard]] std::size_t order() const noexcept {
        std::size_t p = regime.lags.size();
        if (after_break) p = std::max(p, after_break->lags.size());
        return p;
    }

    /// Last time index governed by the first regime.
    [[nodiscard]] std::size_t break_index(std::size_t length) const noexcept {
        if (!break_fraction || !after_break) return length;
        return static_cast<std::size_t>(std::floor(*break_fraction * static_cast<double>(length)));
    }

    /// Throws InvalidArgument when the spec is inconsistent.
    void validate() const {
        const auto check_regime = [this](const Regime& r, const char* label) {
            if (r.innovation_variances.size() != basis_dimension) {
                throw InvalidArgument(std::string(label) + ": need " + std::to_string(basis_dimension) +
                                      " innovation variances");
            }
            for (double v : r.innovation_variances) {
                if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(label) + ": negative variance");
            }
            for (const auto& lag : r.lags) {
                if (static_cast<std::size_t>(lag.variances.rows()) != basis_dimension ||
                    static_cast<std::size_t>(lag.variances.cols()) != basis_dimension) {
                    throw InvalidArgument(std::string(label) + ": operator variances must be L x L");
                }
                if (!(lag.variances.array() >= 0.0).all() || !lag.variances.allFinite()) {
                    throw InvalidArgument(std::string(label) + ": operator variances must be finite and >= 0");
                }
            }
            if (!(r.innovation_scale.lower_bound() >= 0.0)) {
                throw InvalidArgument(std::string(label) + ": innovation scale profile must stay non-negative");
            }
        };
        if (basis_dimension < 1) throw InvalidArgument("basis dimension must be >= 1");
        if (grid_size < 2) throw InvalidArgument("grid size must be >= 2");
        check_regime(regime, "regime");
        if (after_break) {
            check_regime(*after_break, "after_break");
            if (!break_fraction || !(*break_fraction > 0.0 && *break_fraction < 1.0)) {
                throw InvalidArgument("break fraction must lie in (0,1)");
            }
        }
    }
};

/**
 * @brief Random L x L operator with prescribed signed spectral norm.
 *
 * Entries are independent N(0, variances(l,l')); the draw is rescaled so that
 * its norm of the given kind (by default the largest singular value) equals
 * |norm|, then multiplied by sign(norm).
 */
[[nodiscard]] inline Eigen::MatrixXd draw_operator(const Eigen::MatrixXd& variances, double norm, CounterRng& rng,
                                                   OperatorNorm kind = OperatorNorm::spectral) {
    if (!std::isfinite(norm)) throw InvalidArgument("operator norm must be finite");
    const auto rows = variances.rows();
    const auto cols = variances.cols();
    if (norm == 0.0) return Eigen::MatrixXd::Zero(rows, cols);
    for (int attempt = 0; attempt < 2; ++attempt) {
        Eigen::MatrixXd a(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = std::sqrt(variances(i, j)) * rng.normal();
        }
        const double current = matrix_norm(a, kind);
        if (current > 0.0) return a * (norm / current);
    }
    throw SimulationError("operator draw is identically zero (all variances zero?)");
}

namespace detail {

struct DrawnRegime {
    const Regime* regime;
    std::vector<Eigen::MatrixXd> unit_operators;
};

inline DrawnRegime draw_regime(const Regime& regime, OperatorNorm kind, CounterRng& rng) {
    DrawnRegime out{&regime, {}};
    for (const auto& lag : regime.lags) {
        const bool all_zero = (lag.variances.array() == 0.0).all();
        out.unit_operators.push_back(all_zero ? Eigen::MatrixXd::Zero(lag.variances.rows(), lag.variances.cols())
                                              : draw_operator(lag.variances, 1.0, rng, kind));
    }
    return out;
}

}  // namespace detail

/**
 * @brief T x L matrix of Fourier coefficients from the VAR(p) recursion.
 *
 * Operators are drawn once per call (unit norm of the spec's kind) and scaled by
 * kappa_j(t) at every step; innovations are N(0, sigma_l^2 s^2(t)).
 */
[[nodiscard]] inline Eigen::MatrixXd simulate_coefficients(const TvFarSpec& spec, std::size_t length,
                                                           CounterRng& rng) {
    spec.validate();
    if (length < 1) throw InvalidArgument("simulation length must be >= 1");
    constexpr double kOverflowGuard = 1e12;
    const auto dim = static_cast<Eigen::Index>(spec.basis_dimension);
    const std::size_t p = spec.order();

    const auto before = detail::draw_regime(spec.regime, spec.operator_norm, rng);
    std::optional<detail::DrawnRegime> after;
    if (spec.after_break) after = detail::draw_regime(*spec.after_break, spec.operator_norm, rng);
    const std::size_t break_at = spec.break_index(length);

    std::vector<Eigen::VectorXd> history(p + 1, Eigen::VectorXd::Zero(dim));  // ring buffer
    Eigen::MatrixXd out(static_cast<Eigen::Index>(length), dim);
    std::vector<double> sd(spec.basis_dimension);
    const std::size_t total = spec.burn_in + length;

    for (std::size_t step = 0; step < total; ++step) {
        const bool burning = step < spec.burn_in;
        const std::size_t t = burning ? 1 : step - spec.burn_in + 1;
        const auto& drawn = (!burning && after && t > break_at) ? *after : before;
        const Regime& regime = *drawn.regime;

        Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
        for (std::size_t lag = 1; lag <= regime.lags.size(); ++lag) {
            const double kappa = regime.lags[lag - 1].norm.at(t, length);
            if (kappa == 0.0) continue;
            const auto& prev = history[(step + p + 1 - lag) % (p + 1)];
            x.noalias() += kappa * (drawn.unit_operators[lag - 1] * prev);
        }
        const double scale = std::sqrt(regime.innovation_scale.at(t, length));
        for (Eigen::Index l = 0; l < dim; ++l) {
            x(l) += scale * std::sqrt(regime.innovation_variances[static_cast<std::size_t>(l)]) * rng.normal();
        }
        if (!(x.lpNorm<Eigen::Infinity>() <= kOverflowGuard)) {
            std::string schedules;
            for (std::size_t lag = 1; lag <= regime.lags.size(); ++lag) {
                schedules += " kappa_" + std::to_string(lag) + "(t)=" +
                             std::to_string(regime.lags[lag - 1].norm.at(t, length));
            }
            throw SimulationError("tvFAR recursion of model " + spec.name + " diverged at step " +
                                  std::to_string(step) + " (t=" + std::to_string(t) + "):" + schedules);
        }
        if (p > 0) history[step % (p + 1)] = x;
        if (!burning) out.row(static_cast<Eigen::Index>(t - 1)) = x.transpose();
    }
    return out;
}

/// Curves X_t(tau_g) = sum_l X~_{t,l} psi_l(tau_g) on the spec's grid.
[[nodiscard]] inline FunctionalTimeSeries simulate(const TvFarSpec& spec, std::size_t length, CounterRng& rng) {
    const Eigen::MatrixXd coeffs = simulate_coefficients(spec, length, rng);
    const Eigen::MatrixXd basis = evaluate_basis(FourierBasis{spec.basis_dimension}, spec.grid_size);
    return FunctionalTimeSeries::from_matrix(coeffs * basis);
}

// Coefficient-variance families used by the presets (l, l' are 1-based).

[[nodiscard]] inline Eigen::MatrixXd exp_sum_variances(std::size_t dim) {
    Eigen::MatrixXd v(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index j = 0; j < v.cols(); ++j) v(i, j) = std::exp(-static_cast<double>(i + 1 + j + 1));
    }
    return v;
}

[[nodiscard]] inline Eigen::MatrixXd inverse_power_variances(std::size_t dim) {
    Eigen::MatrixXd v(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            v(i, j) = 1.0 / (static_cast<double>(i + 1) + std::pow(static_cast<double>(j + 1), 1.5));
        }
    }
    return v;
}

/// scale * exp(rate (l - 1)), l = 1..dim
[[nodiscard]] inline std::vector<double> exp_ramp_variances(std::size_t dim, double scale = 1.0, double rate = 0.1) {
    std::vector<double> v(dim);
    for (std::size_t l = 0; l < dim; ++l) v[l] = scale * std::exp(rate * static_cast<double>(l));
    return v;
}

struct PresetOptions {
    std::size_t basis_dimension = 15;
    std::size_t grid_size = 100;
    std::size_t burn_in = 100;
    /// Period P in model IV's variance profile; 0 means "use T".
    std::size_t model4_period = 1024;
    /// Use exp(-(l-1)/10) instead of exp((l-1)/10) for the innovation variances.
    bool decreasing_innovations = false;
    /// Norm that the kappa values prescribe; see OperatorNorm.
    OperatorNorm operator_norm = OperatorNorm::max_column_sum;
};

/// The six simulation models: I-III stationary, IV-VI non-stationary.
[[nodiscard]] inline TvFarSpec preset(std::string_view name, const PresetOptions& options = {}) {
    const std::size_t dim = options.basis_dimension;
    const double rate = options.decreasing_innovations ? -0.1 : 0.1;
    TvFarSpec spec;
    spec.name = std::string(name);
    spec.basis_dimension = dim;
    spec.grid_size = options.grid_size;
    spec.burn_in = options.burn_in;
    spec.operator_norm = options.operator_norm;
    spec.regime.innovation_variances = exp_ramp_variances(dim, 1.0, rate);

    const auto far2 = [&](double k1, double k2) {
        return std::vector<LagSpec>{{exp_sum_variances(dim), Profile::constant(k1)},
                                    {inverse_power_variances(dim), Profile::constant(k2)}};
    };

    if (name == "I") {
        // white noise, order 0
    } else if (name == "II") {
        spec.regime.lags = far2(0.75, -0.4);
    } else if (name == "III") {
        spec.regime.lags = far2(0.4, 0.45);
    } else if (name == "IV") {
        spec.regime.lags = {{exp_sum_variances(dim), Profile::constant(0.8)}};
        spec.regime.innovation_scale = {.kind = Profile::Kind::harmonic_cosine,
                                        .amplitude = 1.0,
                                        .offset = 0.5,
                                        .cos_weight = 1.0,
                                        .sin_weight = 0.3,
                                        .cycles = 1.0,
                                        .period = options.model4_period};
        if (!(spec.regime.innovation_scale.lower_bound() > 0.0)) {
            throw std::logic_error("model IV variance profile must be strictly positive");
        }
    } else if (name == "V") {
        // kappa_1(t) = 1.8 cos(1.5 - cos(4 pi t / T))
        const Profile kappa1{.kind = Profile::Kind::harmonic_cosine,
                             .amplitude = 1.8,
                             .offset = 1.5,
                             .cos_weight = -1.0,
                             .cycles = 2.0,
                             .period = 0};
        spec.regime.lags = {{exp_sum_variances(dim), kappa1}, {exp_sum_variances(dim), Profile::constant(-0.81)}};
    } else if (name == "VI") {
        spec.regime.lags = far2(0.7, 0.2);
        Regime after;
        after.lags = far2(0.0, -0.2);
        after.innovation_variances = exp_ramp_variances(dim, 2.0, rate);
        spec.after_break = std::move(after);
        spec.break_fraction = 3.0 / 8.0;
    } else {
        throw InvalidArgument("unknown model preset '" + std::string(name) + "' (expected I..VI)");
    }
    spec.validate();
    return spec;
}

}  // namespace fts::sim
