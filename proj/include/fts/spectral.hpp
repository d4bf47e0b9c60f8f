#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "fts/core.hpp"
#include "fts/errors.hpp"

namespace fts {

/// Largest M' <= M with T = M' * N' and N' even; 0 if none exists.
[[nodiscard]] inline std::size_t largest_admissible_blocks(std::size_t length, std::size_t blocks) noexcept {
    for (std::size_t m = std::min(blocks, length); m >= 1; --m) {
        if (length % m == 0 && (length / m) % 2 == 0) return m;
    }
    return 0;
}

/**
 * @brief Partition of 1..T into M consecutive blocks of even length N.
 *
 * Block j (1-based) covers times N(j-1)+1 .. Nj and has midpoint
 * u_j = (N(j-1) + N/2) / T. Canonical frequencies are omega_k = 2 pi k / N.
 */
class BlockDesign {
public:
    [[nodiscard]] std::size_t length() const noexcept { return length_; }
    [[nodiscard]] std::size_t blocks() const noexcept { return blocks_; }
    [[nodiscard]] std::size_t block_length() const noexcept { return block_length_; }
    /// floor(N/2): number of positive frequencies entering the statistics.
    [[nodiscard]] std::size_t frequency_count() const noexcept { return block_length_ / 2; }

    [[nodiscard]] double midpoint(std::size_t j) const {
        check_block(j);
        return static_cast<double>(block_length_ * (j - 1) + block_length_ / 2) / static_cast<double>(length_);
    }

    [[nodiscard]] double frequency(long k) const noexcept {
        return 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(block_length_);
    }

    /// First time index (1-based) of block j.
    [[nodiscard]] std::size_t block_start(std::size_t j) const {
        check_block(j);
        return block_length_ * (j - 1) + 1;
    }

    [[nodiscard]] std::size_t block_end(std::size_t j) const {
        check_block(j);
        return block_length_ * j;
    }

    /// Frequency index reduced to 0..N-1 (omega_{-k} = omega_{N-k} on the DFT grid).
    [[nodiscard]] std::size_t wrap_frequency(long k) const noexcept {
        const long n = static_cast<long>(block_length_);
        return static_cast<std::size_t>(((k % n) + n) % n);
    }

    void check_block(std::size_t j) const {
        if (j < 1 || j > blocks_) {
            throw IndexError("block index " + std::to_string(j) + " outside 1.." + std::to_string(blocks_));
        }
    }

private:
    friend BlockDesign make_design(std::size_t, std::size_t);
    BlockDesign(std::size_t length, std::size_t blocks)
        : length_(length), blocks_(blocks), block_length_(length / blocks) {}

    std::size_t length_;
    std::size_t blocks_;
    std::size_t block_length_;
};

/// Validates T = M N with N even; otherwise throws DesignError carrying the largest admissible M' <= M.
[[nodiscard]] inline BlockDesign make_design(std::size_t length, std::size_t blocks) {
    if (blocks == 0) throw DesignError("number of blocks must be positive", 0);
    if (blocks > length || length % blocks != 0 || (length / blocks) % 2 != 0) {
        const auto admissible = largest_admissible_blocks(length, blocks);
        throw DesignError("T=" + std::to_string(length) + " is not M*N with M=" + std::to_string(blocks) +
                              " and N even; largest admissible M is " + std::to_string(admissible),
                          admissible);
    }
    return BlockDesign(length, blocks);
}

/// D_N^{u_j, omega_k} for one block and frequency.
struct LocalFourierTransform {
    std::size_t block = 1;
    long frequency = 0;
    ComplexCurve curve;
};

namespace detail {

/// Fills out[k*G + g] = D^{u_j, omega_k}(tau_g) for k = 0..N-1. Two real grid
/// channels share one complex transform.
inline void transform_block(const FunctionalTimeSeries& series, const BlockDesign& design, std::size_t j,
                            Eigen::FFT<double>& fft, std::span<Complex> out, std::vector<Complex>& buffer,
                            std::vector<Complex>& spectrum) {
    const std::size_t n = design.block_length();
    const std::size_t grid = series.grid_size();
    const std::size_t t0 = design.block_start(j);
    const double scale = 1.0 / std::sqrt(2.0 * std::numbers::pi * static_cast<double>(n));
    const auto values = series.values();
    buffer.resize(n);
    for (std::size_t g = 0; g < grid; g += 2) {
        const bool paired = g + 1 < grid;
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t row = (t0 - 1 + s) * grid;
            buffer[s] = {values[row + g], paired ? values[row + g + 1] : 0.0};
        }
        fft.fwd(spectrum, buffer);
        for (std::size_t k = 0; k < n; ++k) {
            const Complex z = spectrum[k];
            const Complex zc = std::conj(spectrum[(n - k) % n]);
            out[k * grid + g] = 0.5 * (z + zc) * scale;
            if (paired) out[k * grid + g + 1] = Complex(0.0, -0.5) * (z - zc) * scale;
        }
    }
}

}  // namespace detail

/// fDFT of block j at frequency index k (any integer; negative k wraps to N+k).
[[nodiscard]] inline LocalFourierTransform fdft(const FunctionalTimeSeries& series, const BlockDesign& design,
                                                std::size_t j, long k) {
    design.check_block(j);
    if (design.length() != series.length()) throw DimensionError("design length differs from series length");
    const std::size_t n = design.block_length();
    const std::size_t grid = series.grid_size();
    Eigen::FFT<double> fft;
    std::vector<Complex> all(n * grid), buffer, spectrum;
    detail::transform_block(series, design, j, fft, all, buffer, spectrum);
    const std::size_t idx = design.wrap_frequency(k);
    LocalFourierTransform result{j, k, {}};
    result.curve.values.assign(all.begin() + static_cast<std::ptrdiff_t>(idx * grid),
                               all.begin() + static_cast<std::ptrdiff_t>((idx + 1) * grid));
    return result;
}

/**
 * @brief fDFTs of every block at frequencies k = 0..floor(N/2).
 *
 * This is everything the block statistics consume. Blocks are transformed
 * independently, so the result for block j depends only on its N rows.
 */
class LocalTransforms {
public:
    LocalTransforms(const FunctionalTimeSeries& series, const BlockDesign& design)
        : blocks_(design.blocks()),
          frequencies_(design.frequency_count() + 1),
          grid_(series.grid_size()),
          data_(blocks_ * frequencies_ * grid_) {
        if (design.length() != series.length()) throw DimensionError("design length differs from series length");
        const std::size_t n = design.block_length();
        Eigen::FFT<double> fft;
        std::vector<Complex> all(n * grid_), buffer, spectrum;
        for (std::size_t j = 1; j <= blocks_; ++j) {
            detail::transform_block(series, design, j, fft, all, buffer, spectrum);
            std::copy(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(frequencies_ * grid_),
                      data_.begin() + static_cast<std::ptrdiff_t>((j - 1) * frequencies_ * grid_));
        }
    }

    [[nodiscard]] std::size_t blocks() const noexcept { return blocks_; }
    /// Highest stored frequency index, floor(N/2).
    [[nodiscard]] std::size_t max_frequency() const noexcept { return frequencies_ - 1; }
    [[nodiscard]] std::size_t grid_size() const noexcept { return grid_; }

    /// D^{u_j, omega_k}, j in 1..M, k in 0..floor(N/2).
    [[nodiscard]] std::span<const Complex> at(std::size_t j, std::size_t k) const noexcept {
        return std::span<const Complex>(data_).subspan(((j - 1) * frequencies_ + k) * grid_, grid_);
    }

private:
    std::size_t blocks_;
    std::size_t frequencies_;
    std::size_t grid_;
    std::vector<Complex> data_;
};

/// <I_a, I_b>_HS = |<D_a, D_b>|^2 for rank-one periodogram tensors.
[[nodiscard]] inline double hs_inner_periodograms(std::span<const Complex> a, std::span<const Complex> b) {
    return std::norm(l2_inner(a, b));
}

[[nodiscard]] inline double hs_inner_periodograms(const LocalFourierTransform& a, const LocalFourierTransform& b) {
    return hs_inner_periodograms(a.curve.view(), b.curve.view());
}

/// Hermitian M x M matrix of <D^{u_j1, omega_k}, D^{u_j2, omega_k}>, k in 0..floor(N/2).
[[nodiscard]] inline Eigen::MatrixXcd gram_row(const LocalTransforms& transforms, std::size_t k) {
    if (k > transforms.max_frequency()) throw IndexError("frequency index beyond floor(N/2)");
    const auto m = static_cast<Eigen::Index>(transforms.blocks());
    const auto g = static_cast<Eigen::Index>(transforms.grid_size());
    Eigen::MatrixXcd d(g, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto col = transforms.at(static_cast<std::size_t>(j) + 1, k);
        for (Eigen::Index i = 0; i < g; ++i) d(i, j) = col[static_cast<std::size_t>(i)];
    }
    // entry (j1, j2) = (1/G) sum_g D_j1 conj(D_j2)
    Eigen::MatrixXcd gram = (d.transpose() * d.conjugate()) / static_cast<double>(g);
    return gram;
}

[[nodiscard]] inline Eigen::MatrixXcd gram_row(const FunctionalTimeSeries& series, const BlockDesign& design,
                                               long k) {
    const std::size_t idx = design.wrap_frequency(k);
    if (idx <= design.frequency_count()) return gram_row(LocalTransforms(series, design), idx);
    // frequencies above N/2 are conjugates of N - idx for real input
    return gram_row(LocalTransforms(series, design), design.block_length() - idx).conjugate();
}

}  // namespace fts
