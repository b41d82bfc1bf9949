// spectral.hpp — spectral density of the environment

#pragma once

#include "qbm/params.hpp"

namespace qbm {

// Only the sharp-cutoff Ohmic form is provided; the enumeration leaves room for
// sub- and super-Ohmic exponents.
enum class SpectralKind { ohmic_sharp_cutoff };

struct SpectralDensity {
    SpectralKind kind{SpectralKind::ohmic_sharp_cutoff};
    double friction{};  // Gamma = M gamma
    double cutoff{};    // Lambda

    static SpectralDensity ohmic(const SystemParams& sys, const BathParams& bath);

    // I(omega) = (2/pi) Gamma omega theta(Lambda - omega), theta(0) = 1/2. Throws for omega < 0.
    double evaluate(double omega) const;

    // I(omega) / omega below the cutoff.
    double slope() const;
};

}  // namespace qbm
