// test_spectral.cpp

#include <doctest.h>

#include <numbers>
#include <stdexcept>

#include "qbm/spectral.hpp"

using namespace qbm;

TEST_CASE("Ohmic density is linear below the cutoff and zero above") {
    const auto I = SpectralDensity::ohmic({2.0, 0.0, 1.0}, {0.05, 200.0, 0.0});
    CHECK(I.friction == doctest::Approx(0.1));
    CHECK(I.slope() == doctest::Approx(2.0 * 0.1 / std::numbers::pi));
    CHECK(I.evaluate(0.0) == 0.0);
    CHECK(I.evaluate(100.0) == doctest::Approx(100.0 * I.slope()));
    CHECK(I.evaluate(200.0) == doctest::Approx(0.5 * 200.0 * I.slope()));
    CHECK(I.evaluate(200.0001) == 0.0);
    CHECK_THROWS_AS(I.evaluate(-1.0), std::invalid_argument);
}

TEST_CASE("ohmic() validates its inputs") {
    CHECK_THROWS_AS(SpectralDensity::ohmic({}, {0.0, 200.0, 0.0}), std::invalid_argument);
}
