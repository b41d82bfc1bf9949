// test_kernels.cpp — noise kernel closed forms against quadrature and an independent oracle

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "qbm/analysis.hpp"
#include "qbm/kernels.hpp"

using namespace qbm;

namespace {
const SystemParams sys{1.0, 1e-4, 1.0};
const BathParams cold{0.05, 200.0, 0.0};
const BathParams hot{0.1, 200.0, 50.0};
}  // namespace

TEST_CASE("zero-temperature kernel at s = 0 and its symmetry") {
    const double nu00 = sys.mass * cold.gamma * cold.cutoff * cold.cutoff / std::numbers::pi;
    CHECK(noise_kernel_zero_T_closed(sys, cold, 0.0) == doctest::Approx(nu00).epsilon(1e-15));
    CHECK(noise_kernel(sys, cold, 0.0) == doctest::Approx(nu00));
    for (double s : {1e-6, 0.003, 0.2, 7.0}) {
        CHECK(noise_kernel(sys, cold, -s) == noise_kernel(sys, cold, s));
    }
    // continuity across the series switch at Lambda s = 1e-4
    const double s0 = 1e-4 / cold.cutoff;
    CHECK(noise_kernel_zero_T_closed(sys, cold, s0 * (1 - 1e-9)) ==
          doctest::Approx(noise_kernel_zero_T_closed(sys, cold, s0 * (1 + 1e-9))).epsilon(1e-12));
}

TEST_CASE("zero-temperature closed form matches the Boost oracle") {
    for (double s : {0.0, 1e-4, 1e-3, 0.01, 0.0314, 0.1, 1.0, 5.0}) {
        CAPTURE(s);
        const double ref = oracle::noise_kernel(1.0, cold.gamma, cold.cutoff, 0.0, 1.0, s);
        const double scale = noise_kernel_zero_T_closed(sys, cold, 0.0);
        CHECK(std::abs(noise_kernel_zero_T_closed(sys, cold, s) - ref) <= 1e-11 * scale);
    }
}

TEST_CASE("quadrature reproduces the zero-temperature closed form") {
    const auto grid = log_spaced(1e-3 / cold.cutoff, 1e3 / cold.cutoff, 40);
    for (double s : grid) {
        CAPTURE(s);
        const double closed = noise_kernel_zero_T_closed(sys, cold, s);
        const double q = noise_kernel_quadrature(sys, cold, s, {1e-13, 1e-13});
        CHECK(std::abs(q - closed) <= 1e-9 * std::abs(closed) + 1e-12);
    }
}

TEST_CASE("finite-temperature kernel matches the Boost oracle") {
    for (double s : {0.0, 1e-3, 0.01, 0.1, 1.0}) {
        CAPTURE(s);
        const double ref = oracle::noise_kernel(1.0, hot.gamma, hot.cutoff, hot.kT, 1.0, s);
        const double scale = oracle::noise_kernel(1.0, hot.gamma, hot.cutoff, hot.kT, 1.0, 0.0);
        CHECK(std::abs(noise_kernel(sys, hot, s) - ref) <= 1e-9 * scale);
    }
}

TEST_CASE("high-temperature closed form is the kT >> hbar Lambda limit") {
    const BathParams very_hot{0.1, 200.0, 1e6};
    for (double s : {0.0, 1e-3, 0.02, 0.5}) {
        CAPTURE(s);
        const double q = noise_kernel_quadrature(sys, very_hot, s);
        const double scale = noise_kernel_high_T_closed(sys, very_hot, 0.0);
        CHECK(std::abs(noise_kernel_high_T_closed(sys, very_hot, s) - q) <= 1e-4 * scale);
    }
    // amplitude (4 M gamma kT / pi hbar) Lambda at s = 0
    CHECK(noise_kernel_high_T_closed(sys, hot, 0.0) ==
          doctest::Approx(4.0 * 0.1 * 50.0 / std::numbers::pi * 200.0));
}

TEST_CASE("thermal weight") {
    CHECK(thermal_weight(sys, cold, 3.0) == 3.0);
    CHECK(thermal_weight(sys, hot, 0.0) == doctest::Approx(100.0));
    CHECK(thermal_weight(sys, hot, 10.0) == doctest::Approx(10.0 / std::tanh(0.1)));
}

TEST_CASE("kernel trace") {
    const std::vector<double> grid{0.0, 0.01, 0.02, 0.05};
    const auto t = kernel_trace(sys, cold, grid, KernelMethod::closed_zero_T);
    REQUIRE(t.values.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(t.values[i] == noise_kernel_zero_T_closed(sys, cold, grid[i]));
    }
    CHECK(t.method == KernelMethod::closed_zero_T);
    const std::vector<double> bad{0.1, 0.05};
    CHECK_THROWS_AS(kernel_trace(sys, cold, bad, KernelMethod::closed_zero_T), std::invalid_argument);
    CHECK_THROWS_AS(kernel_trace(sys, hot, grid, KernelMethod::closed_zero_T), std::invalid_argument);
}

TEST_CASE("method names round-trip") {
    for (auto m : {KernelMethod::closed_zero_T, KernelMethod::closed_high_T, KernelMethod::quadrature}) {
        CHECK(kernel_method_from_string(to_string(m)) == m);
    }
    CHECK_THROWS_AS(kernel_method_from_string("exact"), std::invalid_argument);
}
