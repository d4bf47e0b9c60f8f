#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fts/core.hpp"
#include "fts/rng.hpp"

namespace fts::testing {

/// T x G matrix of i.i.d. N(0,1) values.
inline FunctionalTimeSeries gaussian_series(std::size_t length, std::size_t grid, std::uint64_t seed) {
    CounterRng rng(seed, 0, 7);
    std::vector<double> v(length * grid);
    for (double& x : v) x = rng.normal();
    return {length, grid, std::move(v)};
}

/// Scalar white noise replicated across the grid (a constant-in-tau curve per time).
inline FunctionalTimeSeries scalar_noise(std::size_t length, std::size_t grid, std::uint64_t seed) {
    CounterRng rng(seed, 0, 11);
    std::vector<double> v(length * grid);
    for (std::size_t t = 0; t < length; ++t) {
        const double x = rng.normal();
        for (std::size_t g = 0; g < grid; ++g) v[t * grid + g] = x;
    }
    return {length, grid, std::move(v)};
}

/// X_t(tau) = t for every tau.
inline FunctionalTimeSeries ramp_series(std::size_t length, std::size_t grid) {
    std::vector<double> v(length * grid);
    for (std::size_t t = 0; t < length; ++t) {
        for (std::size_t g = 0; g < grid; ++g) v[t * grid + g] = static_cast<double>(t + 1);
    }
    return {length, grid, std::move(v)};
}

inline FunctionalTimeSeries constant_series(std::size_t length, std::size_t grid, double value) {
    return {length, grid, std::vector<double>(length * grid, value)};
}

inline double relative_error(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace fts::testing
