#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fts/core.hpp"
#include "fts/csv.hpp"
#include "fts/normal.hpp"
#include "fts/rng.hpp"
#include "support.hpp"

using namespace fts;
using Catch::Approx;

TEST_CASE("FunctionalTimeSeries validates its shape and values", "[core]") {
    CHECK_THROWS_AS(FunctionalTimeSeries(1, 3, {1, 2, 3}), DimensionError);
    CHECK_THROWS_AS(FunctionalTimeSeries(2, 1, {1, 2}), DimensionError);
    CHECK_THROWS_AS(FunctionalTimeSeries(2, 2, {1, 2, 3}), DimensionError);
    CHECK_THROWS_AS(FunctionalTimeSeries(2, 2, {1, 2, NAN, 4}), InvalidArgument);

    const FunctionalTimeSeries s(3, 2, {1, 2, 3, 4, 5, 6});
    CHECK(s(2, 1) == 3);
    CHECK(s.curve(3)[1] == 6);
    CHECK_THROWS_AS(s.curve(0), IndexError);
    CHECK_THROWS_AS(s.curve(4), IndexError);
    const auto tail = s.tail(2);
    CHECK(tail.length() == 2);
    CHECK(tail(1, 1) == 3);
    CHECK(s.scaled(2.0)(3, 2) == 12);
}

TEST_CASE("grid is uniform with right endpoints", "[core]") {
    const auto s = testing::constant_series(2, 100, 0.0);
    const auto tau = s.grid();
    CHECK(tau.front() == Approx(0.01));
    CHECK(tau.back() == 1.0);
    for (std::size_t g = 1; g < tau.size(); ++g) CHECK(std::abs(tau[g] - tau[g - 1] - 0.01) < 1e-12);
}

TEST_CASE("l2_inner is the plain grid average", "[core]") {
    std::vector<Complex> ones(100, Complex(1.0, 0.0));
    CHECK(std::abs(l2_inner(std::span<const Complex>(ones), std::span<const Complex>(ones)) - 1.0) < 1e-15);

    std::vector<Complex> s(100), c(100);
    for (std::size_t g = 1; g <= 100; ++g) {
        const double tau = grid_point(g, 100);
        s[g - 1] = std::numbers::sqrt2 * std::sin(2 * std::numbers::pi * tau);
        c[g - 1] = std::numbers::sqrt2 * std::cos(2 * std::numbers::pi * tau);
    }
    CHECK(std::abs(l2_inner(std::span<const Complex>(s), std::span<const Complex>(c))) < 1e-12);

    std::vector<Complex> short_curve(99);
    CHECK_THROWS_AS(l2_inner(std::span<const Complex>(s), std::span<const Complex>(short_curve)), DimensionError);
}

TEST_CASE("l2_inner agrees with an extended-precision sum and is conjugate symmetric", "[core]") {
    using Big = boost::multiprecision::cpp_bin_float_50;
    CounterRng rng(2024, 1);
    std::vector<Complex> f(50), g(50);
    for (auto& z : f) z = {rng.normal() * 1e3, rng.normal()};
    for (auto& z : g) z = {rng.normal(), rng.normal() * 1e-3};
    Big re = 0, im = 0;
    for (std::size_t i = 0; i < 50; ++i) {
        const Big a(f[i].real()), b(f[i].imag()), c(g[i].real()), d(g[i].imag());
        re += a * c + b * d;
        im += b * c - a * d;
    }
    re /= 50;
    im /= 50;
    const Complex z = l2_inner(std::span<const Complex>(f), std::span<const Complex>(g));
    const double scale = std::abs(Complex(re.convert_to<double>(), im.convert_to<double>()));
    CHECK(std::abs(z.real() - re.convert_to<double>()) <= 1e-13 * scale);
    CHECK(std::abs(z.imag() - im.convert_to<double>()) <= 1e-13 * scale);

    const Complex w = l2_inner(std::span<const Complex>(g), std::span<const Complex>(f));
    CHECK(std::abs(z - std::conj(w)) <= 1e-15 * scale);

    const Complex ff = l2_inner(std::span<const Complex>(f), std::span<const Complex>(f));
    CHECK(ff.imag() == 0.0);
    CHECK(ff.real() >= 0.0);
}

TEST_CASE("l2_inner is linear in its first argument", "[core]") {
    CounterRng rng(5);
    std::vector<Complex> f(40), h(40), g(40), mix(40);
    const Complex a(0.3, -1.2), b(2.0, 0.5);
    for (std::size_t i = 0; i < 40; ++i) {
        f[i] = {rng.normal(), rng.normal()};
        h[i] = {rng.normal(), rng.normal()};
        g[i] = {rng.normal(), rng.normal()};
        mix[i] = a * f[i] + b * h[i];
    }
    const auto in = [](const auto& x, const auto& y) {
        return l2_inner(std::span<const Complex>(x), std::span<const Complex>(y));
    };
    CHECK(std::abs(in(mix, g) - (a * in(f, g) + b * in(h, g))) < 1e-13);
}

TEST_CASE("Fourier basis evaluation", "[core]") {
    const auto one = evaluate_basis(FourierBasis{1}, 10);
    CHECK(one.rows() == 1);
    CHECK((one.array() == 1.0).all());

    const auto three = evaluate_basis(FourierBasis{3}, 100);
    CHECK(std::abs(three.row(1).mean()) < 1e-12);
    CHECK(std::abs(three.row(2).mean()) < 1e-12);
    CHECK(FourierBasis::value(2, 0.25) == Approx(std::numbers::sqrt2));
    CHECK(FourierBasis::value(3, 0.0) == Approx(std::numbers::sqrt2));

    const auto b = evaluate_basis(FourierBasis{15}, 100);
    const Eigen::MatrixXd gram = b * b.transpose() / 100.0;
    CHECK((gram - Eigen::MatrixXd::Identity(15, 15)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("CSV reader", "[core][csv]") {
    SECTION("header row is skipped and values parsed") {
        std::istringstream in("t1,t2,t3\n1,2,3\n\n4, 5 ,6e0\n");
        const auto s = csv::read_series(in);
        CHECK(s.length() == 2);
        CHECK(s.grid_size() == 3);
        CHECK(s(2, 2) == 5.0);
    }
    SECTION("ragged rows are rejected") {
        std::istringstream in("1,2,3\n4,5\n");
        CHECK_THROWS_AS(csv::read_series(in), ParseError);
    }
    SECTION("non-numeric data rows are rejected") {
        std::istringstream in("1,2\n3,x\n");
        CHECK_THROWS_AS(csv::read_series(in), ParseError);
    }
    SECTION("round trip through write_series is exact") {
        const auto s = testing::gaussian_series(5, 4, 3);
        std::stringstream io;
        csv::write_series(io, s);
        const auto back = csv::read_series(io);
        CHECK(std::equal(s.values().begin(), s.values().end(), back.values().begin()));
    }
}

TEST_CASE("normal distribution routines", "[core][normal]") {
    // frozen at 40 digits by tests/oracle/freeze_values.py
    CHECK(std::abs(normal::cdf(-1.0) - 0.15865525393145705141) < 1e-15);
    CHECK(std::abs(normal::survival(1.0) - 0.15865525393145705141) < 1e-15);
    CHECK(std::abs(normal::quantile(0.95) - 1.6448536269514727149) < 1e-12);
    for (double p : {1e-10, 0.001, 0.2, 0.5, 0.77, 0.999, 1 - 1e-9}) {
        CHECK(std::abs(normal::cdf(normal::quantile(p)) - p) <= 1e-12 * std::max(p, 1e-3));
    }
    CHECK_THROWS(normal::quantile(0.0));
    CHECK_THROWS(normal::quantile(1.0));
}

TEST_CASE("Philox4x32-10 known answer", "[core][rng]") {
    // Random123 known-answer vector: counter 0, key 0
    CounterRng rng(0, 0, 0);
    CHECK(rng() == 0x6627e8d5u);
    CHECK(rng() == 0xe169c58du);
    CHECK(rng() == 0xbc57ac4cu);
    CHECK(rng() == 0x9b00dbd8u);
}

TEST_CASE("counter streams are reproducible and distinct", "[core][rng]") {
    CounterRng a(42, 3), b(42, 3), c(42, 4);
    for (int i = 0; i < 10; ++i) {
        const auto x = a();
        CHECK(x == b());
        (void)c();
    }
    CounterRng d(42, 3), e(42, 4);
    CHECK(d() != e());
    CounterRng u(9);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
}
