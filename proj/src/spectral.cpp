// spectral.cpp

#include "qbm/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qbm {

SpectralDensity SpectralDensity::ohmic(const SystemParams& sys, const BathParams& bath) {
    sys.validate();
    bath.validate();
    return {SpectralKind::ohmic_sharp_cutoff, sys.mass * bath.gamma, bath.cutoff};
}

double SpectralDensity::slope() const {
    return 2.0 / std::numbers::pi * friction;
}

double SpectralDensity::evaluate(double omega) const {
    if (!(omega >= 0.0)) {
        throw std::invalid_argument("spectral density requires omega >= 0");
    }
    if (!(friction > 0.0) || !(cutoff > 0.0)) {
        throw std::invalid_argument("spectral density requires positive friction and cutoff");
    }
    if (omega > cutoff) {
        return 0.0;
    }
    const double step = omega == cutoff ? 0.5 : 1.0;
    return step * slope() * omega;
}

}  // namespace qbm
