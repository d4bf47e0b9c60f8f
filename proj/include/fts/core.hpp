#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fts/errors.hpp"

namespace fts {

using Complex = std::complex<double>;

/// Grid point tau_g = g / G for g = 1..G (right endpoints of a uniform partition of [0,1]).
[[nodiscard]] inline double grid_point(std::size_t g, std::size_t grid_size) noexcept {
    return static_cast<double>(g) / static_cast<double>(grid_size);
}

/**
 * @brief T curves sampled on a common uniform grid of [0,1].
 *
 * Stored row-major: row t (1-based) holds X_t(tau_1), ..., X_t(tau_G).
 * All entries are finite, T >= 2 and G >= 2.
 */
class FunctionalTimeSeries {
public:
    FunctionalTimeSeries(std::size_t length, std::size_t grid_size, std::vector<double> values)
        : length_(length), grid_size_(grid_size), values_(std::move(values)) {
        if (length_ < 2) throw DimensionError("functional time series needs at least 2 curves");
        if (grid_size_ < 2) throw DimensionError("functional time series needs at least 2 grid points");
        if (values_.size() != length_ * grid_size_) {
            throw DimensionError("expected " + std::to_string(length_ * grid_size_) + " values, got " +
                                 std::to_string(values_.size()));
        }
        for (double v : values_) {
            if (!std::isfinite(v)) throw InvalidArgument("functional time series contains a non-finite value");
        }
    }

    /// Builds from a T x G matrix (rows are curves).
    static FunctionalTimeSeries from_matrix(const Eigen::MatrixXd& curves) {
        const auto rows = static_cast<std::size_t>(curves.rows());
        const auto cols = static_cast<std::size_t>(curves.cols());
        std::vector<double> values(rows * cols);
        for (std::size_t t = 0; t < rows; ++t) {
            for (std::size_t g = 0; g < cols; ++g) {
                values[t * cols + g] = curves(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(g));
            }
        }
        return {rows, cols, std::move(values)};
    }

    [[nodiscard]] std::size_t length() const noexcept { return length_; }
    [[nodiscard]] std::size_t grid_size() const noexcept { return grid_size_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    /// Curve X_t, t in 1..T.
    [[nodiscard]] std::span<const double> curve(std::size_t t) const {
        if (t < 1 || t > length_) throw IndexError("time index " + std::to_string(t) + " outside 1.." +
                                                   std::to_string(length_));
        return std::span<const double>(values_).subspan((t - 1) * grid_size_, grid_size_);
    }

    [[nodiscard]] double operator()(std::size_t t, std::size_t g) const noexcept {
        return values_[(t - 1) * grid_size_ + (g - 1)];
    }

    [[nodiscard]] std::vector<double> grid() const {
        std::vector<double> tau(grid_size_);
        for (std::size_t g = 1; g <= grid_size_; ++g) tau[g - 1] = grid_point(g, grid_size_);
        return tau;
    }

    [[nodiscard]] FunctionalTimeSeries scaled(double factor) const {
        std::vector<double> out(values_);
        for (double& v : out) v *= factor;
        return {length_, grid_size_, std::move(out)};
    }

    /// Keeps the last `count` curves (drops the earliest observations).
    [[nodiscard]] FunctionalTimeSeries tail(std::size_t count) const {
        if (count > length_) throw IndexError("tail longer than series");
        std::vector<double> out(values_.end() - static_cast<std::ptrdiff_t>(count * grid_size_), values_.end());
        return {count, grid_size_, std::move(out)};
    }

private:
    std::size_t length_;
    std::size_t grid_size_;
    std::vector<double> values_;
};

/// An element of L^2_C([0,1]) evaluated on the grid.
struct ComplexCurve {
    std::vector<Complex> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] std::span<const Complex> view() const noexcept { return values; }
};

/// (1/G) sum_g f(tau_g) conj(g(tau_g)) -- the plain grid-average quadrature.
[[nodiscard]] inline Complex l2_inner(std::span<const Complex> f, std::span<const Complex> g) {
    if (f.size() != g.size()) {
        throw DimensionError("l2_inner: grid lengths differ (" + std::to_string(f.size()) + " vs " +
                             std::to_string(g.size()) + ")");
    }
    if (f.empty()) throw DimensionError("l2_inner: empty curves");
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = f[i].real(), b = f[i].imag(), c = g[i].real(), d = g[i].imag();
        re += a * c + b * d;
        im += b * c - a * d;
    }
    const double scale = 1.0 / static_cast<double>(f.size());
    return {re * scale, im * scale};
}

[[nodiscard]] inline Complex l2_inner(const ComplexCurve& f, const ComplexCurve& g) {
    return l2_inner(f.view(), g.view());
}

[[nodiscard]] inline double l2_inner(std::span<const double> f, std::span<const double> g) {
    if (f.size() != g.size()) throw DimensionError("l2_inner: grid lengths differ");
    if (f.empty()) throw DimensionError("l2_inner: empty curves");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * g[i];
    return acc / static_cast<double>(f.size());
}

/// Squared L^2 norm under the grid quadrature.
[[nodiscard]] inline double l2_norm_squared(std::span<const Complex> f) {
    double acc = 0.0;
    for (const Complex& z : f) acc += std::norm(z);
    return acc / static_cast<double>(f.size());
}

/**
 * @brief Real Fourier basis on [0,1].
 *
 * psi_1 = 1, psi_{2m} = sqrt(2) sin(2 pi m tau), psi_{2m+1} = sqrt(2) cos(2 pi m tau).
 */
struct FourierBasis {
    std::size_t dimension = 15;

    /// psi_l(tau), l in 1..dimension.
    [[nodiscard]] static double value(std::size_t l, double tau) noexcept {
        if (l == 1) return 1.0;
        const double m = static_cast<double>(l / 2);
        const double arg = 2.0 * std::numbers::pi * m * tau;
        return (l % 2 == 0) ? std::numbers::sqrt2 * std::sin(arg) : std::numbers::sqrt2 * std::cos(arg);
    }
};

/// L x G matrix whose row l-1 holds psi_l at the grid points.
[[nodiscard]] inline Eigen::MatrixXd evaluate_basis(const FourierBasis& basis, std::size_t grid_size) {
    if (basis.dimension < 1) throw InvalidArgument("basis dimension must be >= 1");
    if (grid_size < 2) throw InvalidArgument("grid size must be >= 2");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(basis.dimension), static_cast<Eigen::Index>(grid_size));
    for (std::size_t l = 1; l <= basis.dimension; ++l) {
        for (std::size_t g = 1; g <= grid_size; ++g) {
            out(static_cast<Eigen::Index>(l - 1), static_cast<Eigen::Index>(g - 1)) =
                FourierBasis::value(l, grid_point(g, grid_size));
        }
    }
    return out;
}

}  // namespace fts
