// test_coefficients.cpp — D(t), Theta_D(t) and alpha

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "qbm/analysis.hpp"
#include "qbm/coefficients.hpp"
#include "qbm/special.hpp"

using namespace qbm;

namespace {
const SystemParams free_sys{1.0, 0.0, 1.0};
const SystemParams sys{1.0, 1e-4, 1.0};
const BathParams cold{0.05, 200.0, 0.0};
const BathParams hot{0.1, 200.0, 50.0};
constexpr double pi = std::numbers::pi;
}  // namespace

TEST_CASE("D vanishes at t = 0 and rejects negative times") {
    CHECK(diffusion_coefficient(sys, cold, 0.0) == 0.0);
    CHECK(diffusion_spectral(sys, hot, 0.0) == 0.0);
    CHECK(diffusion_zero_T_free(free_sys, cold, 0.0) == 0.0);
    CHECK(decoherence_exponent(sys, hot, 0.0) == 0.0);
    CHECK(decoherence_exponent(free_sys, cold, 0.0) == 0.0);
    CHECK_THROWS_AS(diffusion_coefficient(sys, cold, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(decoherence_exponent(sys, cold, -1.0), std::invalid_argument);
}

TEST_CASE("three routes to D agree at zero temperature") {
    for (double t : {1e-4, 3e-3, 0.02, 0.5, 3.0}) {
        CAPTURE(t);
        const double closed = diffusion_zero_T_free(free_sys, cold, t);
        const double scale = 2.0 * cold.gamma / pi * cold.cutoff;
        CHECK(std::abs(diffusion_spectral(free_sys, cold, t) - closed) <= 1e-9 * scale);
        CHECK(std::abs(diffusion_coefficient(free_sys, cold, t) - closed) <= 1e-8 * scale);
    }
}

TEST_CASE("s-domain and frequency-domain D agree at finite temperature") {
    const BathParams warm{0.1, 50.0, 5.0};
    for (double t : {0.01, 0.1}) {
        CAPTURE(t);
        const double spectral = diffusion_spectral(sys, warm, t);
        const double nested = diffusion_coefficient(sys, warm, t, {1e-9, 1e-9});
        CHECK(nested == doctest::Approx(spectral).epsilon(1e-6));
    }
}

TEST_CASE("high-temperature D approaches its Markovian plateau 2 M gamma kT / hbar") {
    const double plateau = 2.0 * hot.gamma * hot.kT;
    const double d = diffusion_spectral(sys, hot, 0.5);
    CHECK(d == doctest::Approx(plateau).epsilon(0.02));
}

TEST_CASE("closed-form Theta matches the repeated-integration oracle") {
    for (double t : {1e-5, 1e-3, 0.05, 0.7, 10.0, 100.0}) {
        CAPTURE(t);
        const double ref = oracle::theta_zero_T(1.0, cold.gamma, cold.cutoff, t);
        CHECK(exponent_closed_zero_T(free_sys, cold, t) == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("frequency-quadrature Theta matches the closed form") {
    for (double t : {1e-3, 0.05, 2.0, 50.0, 2000.0}) {
        CAPTURE(t);
        const double closed = exponent_closed_zero_T(free_sys, cold, t);
        CHECK(decoherence_exponent_quadrature(free_sys, cold, t) == doctest::Approx(closed).epsilon(1e-8));
    }
}

TEST_CASE("Theta is the time integral of D at finite temperature") {
    const BathParams warm{0.1, 50.0, 5.0};
    const double t = 0.3;
    const double integral = oracle::panels([&](double s) { return diffusion_spectral(sys, warm, s); }, 0.0, t, 0.01);
    CHECK(decoherence_exponent(sys, warm, t) == doctest::Approx(integral).epsilon(1e-8));
}

TEST_CASE("late-time zero-temperature exponent grows like (2 M gamma / pi) ln(Lambda t)") {
    const double t = 1e4;
    const double leading = 2.0 * cold.gamma / pi * (std::log(cold.cutoff * t) + euler_gamma);
    CHECK(exponent_closed_zero_T(free_sys, cold, t) == doctest::Approx(leading).epsilon(1e-6));
}

TEST_CASE("Theta is nondecreasing at zero temperature for a free particle") {
    double prev = 0.0;
    for (double t : log_spaced(1e-4, 1e4, 400)) {
        const double v = exponent_closed_zero_T(free_sys, cold, t);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("alpha theory") {
    CHECK(alpha_theory(sys, cold, 2.0) == doctest::Approx(2.0 / pi * 0.05 * 4.0).epsilon(1e-15));
    CHECK(alpha_theory(sys, cold, 2.0) == doctest::Approx(0.12732).epsilon(1e-4));
    CHECK(alpha_theory(sys, cold, 4.0) == doctest::Approx(4.0 * alpha_theory(sys, cold, 2.0)));
    CHECK(alpha_theory(sys, hot, 2.0) == doctest::Approx(2.0 / pi * 0.1 * 4.0));
    CHECK(alpha_theory(sys, cold, 0.0) == 0.0);
    CHECK_THROWS_AS(alpha_theory(sys, cold, -1.0), std::invalid_argument);
}

TEST_CASE("coefficient set") {
    const auto zero = CoefficientSet::zero();
    CHECK(zero.diffusion(1.0) == 0.0);
    CHECK(zero.diffusion_integral(1.0) == 0.0);
    const auto c = weak_coupling_coefficients(free_sys, cold);
    CHECK(c.diffusion(0.3) == diffusion_zero_T_free(free_sys, cold, 0.3));
    CHECK(c.diffusion_integral(0.3) == exponent_closed_zero_T(free_sys, cold, 0.3));
    CHECK(c.dissipation(0.3) == 0.0);
    CHECK(c.anomalous(0.3) == 0.0);
    CHECK(c.freq_shift(0.3) == 0.0);
}

TEST_CASE("exponent trace picks its method and matches pointwise evaluation") {
    const std::vector<double> grid{0.0, 1.0, 10.0};
    const auto closed = exponent_trace(free_sys, cold, grid);
    CHECK(closed.method == ExponentMethod::closed_zero_T);
    const auto quad = exponent_trace(sys, cold, grid);
    CHECK(quad.method == ExponentMethod::quadrature);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(quad.theta[i] == decoherence_exponent(sys, cold, grid[i]));
    }
    const std::vector<double> bad{1.0, 1.0};
    CHECK_THROWS_AS(exponent_trace(sys, cold, bad), std::invalid_argument);
}
