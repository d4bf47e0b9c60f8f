#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fts/core.hpp"
#include "fts/errors.hpp"
#include "fts/simulate.hpp"
#include "fts/spectral.hpp"
#include "fts/stationarity.hpp"

// Reference computations for tests. Nothing here is on the production path.
namespace fts::oracle {

/// Largest series length brute_statistics accepts.
inline constexpr std::size_t kBruteMaxLength = 64;

namespace detail {

using Kernel = std::vector<Complex>;  // G x G, row-major

/// D_N^{u_j, omega_k} by direct summation, indexing the block through floor(u_j T) - N/2 + s + 1.
inline std::vector<Complex> direct_fdft(const FunctionalTimeSeries& series, const BlockDesign& design, std::size_t j,
                                        std::size_t k) {
    const std::size_t n = design.block_length();
    const std::size_t grid = series.grid_size();
    const double u = design.midpoint(j);
    const auto anchor = static_cast<std::size_t>(std::floor(u * static_cast<double>(design.length()) + 1e-9));
    const double omega = design.frequency(static_cast<long>(k));
    std::vector<Complex> d(grid, Complex{});
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t t = anchor - n / 2 + s + 1;
        const Complex phase = std::polar(1.0, -omega * static_cast<double>(s));
        for (std::size_t g = 1; g <= grid; ++g) d[g - 1] += series(t, g) * phase;
    }
    const double scale = 1.0 / std::sqrt(2.0 * std::numbers::pi * static_cast<double>(n));
    for (auto& z : d) z *= scale;
    return d;
}

/// Periodogram kernel p(tau, sigma) = D(tau) conj(D(sigma)) on the grid.
inline Kernel periodogram_kernel(const std::vector<Complex>& d) {
    const std::size_t grid = d.size();
    Kernel p(grid * grid);
    for (std::size_t a = 0; a < grid; ++a) {
        for (std::size_t b = 0; b < grid; ++b) p[a * grid + b] = d[a] * std::conj(d[b]);
    }
    return p;
}

/// (1/G^2) sum sum p conj(q)
inline Complex hs_inner(const Kernel& p, const Kernel& q, std::size_t grid) {
    Complex acc{};
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * std::conj(q[i]);
    return acc / static_cast<double>(grid * grid);
}

/// (1/G) sum_g p(g, g)
inline double trace(const Kernel& p, std::size_t grid) {
    double acc = 0.0;
    for (std::size_t g = 0; g < grid; ++g) acc += p[g * grid + g].real();
    return acc / static_cast<double>(grid);
}

}  // namespace detail

struct BruteResult {
    StatisticParts parts;
    double var_h0_hat = 0.0;
};

/**
 * @brief Block statistics from their defining sums with explicit G x G periodogram kernels.
 *
 * No FFT, no Gram-matrix shortcut, block start derived from the midpoint.
 * Guarded to T <= 64.
 */
[[nodiscard]] inline BruteResult brute_statistics(const FunctionalTimeSeries& series, const BlockDesign& design,
                                                  BiasMode mode = BiasMode::scaled) {
    if (series.length() > kBruteMaxLength) {
        throw InvalidArgument("brute_statistics is limited to T <= " + std::to_string(kBruteMaxLength));
    }
    if (series.length() != design.length()) throw DimensionError("design length differs from series length");
    const std::size_t m = design.blocks();
    const std::size_t n = design.block_length();
    const std::size_t kmax = n / 2;
    const std::size_t grid = series.grid_size();

    std::vector<std::vector<detail::Kernel>> kernels(m + 1);
    for (std::size_t j = 1; j <= m; ++j) {
        for (std::size_t k = 0; k <= kmax; ++k) {
            kernels[j].push_back(detail::periodogram_kernel(detail::direct_fdft(series, design, j, k)));
        }
    }

    double f1 = 0.0, f2 = 0.0, bias = 0.0, var = 0.0;
    for (std::size_t k = 1; k <= kmax; ++k) {
        double cross = 0.0;
        detail::Kernel average(grid * grid, Complex{});
        for (std::size_t j = 1; j <= m; ++j) {
            cross += detail::hs_inner(kernels[j][k], kernels[j][k - 1], grid).real();
            bias += detail::trace(kernels[j][k], grid) * detail::trace(kernels[j][k - 1], grid);
            for (std::size_t i = 0; i < average.size(); ++i) average[i] += kernels[j][k][i] / static_cast<double>(m);
        }
        f1 += cross;
        var += (cross / static_cast<double>(m)) * (cross / static_cast<double>(m));
        f2 += detail::hs_inner(average, average, grid).real();
    }
    const double t_len = static_cast<double>(design.length());
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(m);
    f1 /= t_len;
    f2 /= nd;
    bias /= nd * md;
    var *= 16.0 * std::numbers::pi * std::numbers::pi / nd;
    const double factor = mode == BiasMode::scaled ? nd / t_len : 1.0;
    const double m_value = 4.0 * std::numbers::pi * (f1 - f2 + factor * bias);
    return {{f1, f2, bias, m_value, mode, design}, var};
}

/**
 * @brief Modulated white noise X_t = sigma(t/T) eps_t with eps_t i.i.d.
 *
 * eps_t has independent Fourier coefficients with variances sigma_l^2, so the
 * local spectral density operator is sigma^2(u) C / (2 pi).
 */
struct AnalyticSpectrum {
    sim::Profile variance_profile = sim::Profile::constant(1.0);
    std::vector<double> coefficient_variances{1.0};

    void validate() const {
        if (coefficient_variances.empty()) throw InvalidArgument("need at least one coefficient variance");
        for (double v : coefficient_variances) {
            if (!(v >= 0.0)) throw InvalidArgument("coefficient variances must be >= 0");
        }
        if (!(variance_profile.lower_bound() >= 0.0)) throw InvalidArgument("sigma^2(u) must be non-negative");
    }

    /// ||C||_2^2 = sum_l sigma_l^4
    [[nodiscard]] double covariance_hs_squared() const noexcept {
        double acc = 0.0;
        for (double v : coefficient_variances) acc += v * v;
        return acc;
    }
};

namespace detail {

template <class F>
double integrate(F f, double a, double b) {
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-10, &error);
    return value;
}

}  // namespace detail

/// m^2 = [int sigma^4 - (int sigma^2)^2] ||C||_2^2 / (2 pi).
[[nodiscard]] inline double analytic_m2(const AnalyticSpectrum& spectrum) {
    spectrum.validate();
    const auto& profile = spectrum.variance_profile;
    const double second = detail::integrate([&](double u) { return profile.at_fraction(u); }, 0.0, 1.0);
    const double fourth = detail::integrate(
        [&](double u) {
            const double s = profile.at_fraction(u);
            return s * s;
        },
        0.0, 1.0);
    return std::max(0.0, fourth - second * second) * spectrum.covariance_hs_squared() / (2.0 * std::numbers::pi);
}

/**
 * @brief nu_H0^2 = 4 pi int ||F~_omega||_2^4 d omega for i.i.d. noise, F~ = C / (2 pi).
 *
 * Evaluates the omega-integral numerically and checks it against the closed
 * form (sum_l sigma_l^4)^2 / (2 pi^2).
 */
[[nodiscard]] inline double analytic_nu_h0(const std::vector<double>& coefficient_variances) {
    double hs = 0.0;
    bool positive = false;
    for (double v : coefficient_variances) {
        if (!(v >= 0.0)) throw InvalidArgument("coefficient variances must be >= 0");
        hs += v * v;
        positive = positive || v > 0.0;
    }
    if (!positive) throw InvalidArgument("at least one coefficient variance must be positive");
    const double two_pi = 2.0 * std::numbers::pi;
    const double closed = hs * hs / (2.0 * std::numbers::pi * std::numbers::pi);
    const double numeric =
        4.0 * std::numbers::pi *
        detail::integrate(
            [&](double) {
                const double f2 = hs / (two_pi * two_pi);
                return f2 * f2;
            },
            -std::numbers::pi, std::numbers::pi);
    if (std::abs(numeric - closed) > 1e-12 * closed) {
        throw std::logic_error("analytic_nu_h0: quadrature disagrees with closed form");
    }
    return closed;
}

/// The same model as a tvFAR(0) spec, for simulation.
[[nodiscard]] inline sim::TvFarSpec to_tvfar(const AnalyticSpectrum& spectrum, std::size_t grid_size = 100) {
    spectrum.validate();
    sim::TvFarSpec spec;
    spec.name = "modulated-noise";
    spec.basis_dimension = spectrum.coefficient_variances.size();
    spec.grid_size = grid_size;
    spec.burn_in = 0;
    spec.regime.innovation_variances = spectrum.coefficient_variances;
    spec.regime.innovation_scale = spectrum.variance_profile;
    spec.validate();
    return spec;
}

}  // namespace fts::oracle
