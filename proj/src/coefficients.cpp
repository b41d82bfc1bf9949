// coefficients.cpp

#include "qbm/coefficients.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qbm/parallel.hpp"
#include "qbm/special.hpp"
#include "qbm/spectral.hpp"

namespace qbm {

namespace {

constexpr double pi = std::numbers::pi;

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("time must be finite and nonnegative");
    }
}

double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        return 1.0 - x * x / 6.0;
    }
    return std::sin(x) / x;
}

bool closed_form_applies(const SystemParams& sys, const BathParams& bath) {
    return bath.zero_temperature() && sys.frequency == 0.0;
}

// Shared frequency-domain integrand for D and Theta: the time integrals of
// cos(omega s) cos(Omega s) are taken analytically, leaving one oscillatory
// integral over omega with period 2 pi / t.
template <class TimeKernel>
double spectral_integral(const SystemParams& sys, const BathParams& bath, double t,
                         const quad::Tolerance& tol, TimeKernel kernel) {
    const auto density = SpectralDensity::ohmic(sys, bath);
    const double omega0 = sys.frequency;
    auto integrand = [&](double omega) {
        return thermal_weight(sys, bath, omega) * 0.5 * (kernel(omega - omega0) + kernel(omega + omega0));
    };
    const double panel = pi / (2.0 * t);
    const double breaks[] = {omega0};
    const auto r = quad::integrate(integrand, 0.0, density.cutoff, tol, panel, breaks);
    return density.slope() * r.value;
}

}  // namespace

CoefficientSet CoefficientSet::zero() {
    auto none = [](double) { return 0.0; };
    return {none, none, none, none, none};
}

CoefficientSet weak_coupling_coefficients(const SystemParams& sys, const BathParams& bath,
                                          const quad::Tolerance& tol) {
    sys.validate();
    bath.validate();
    CoefficientSet c = CoefficientSet::zero();
    if (closed_form_applies(sys, bath)) {
        c.diffusion = [=](double t) { return diffusion_zero_T_free(sys, bath, t); };
    } else {
        c.diffusion = [=](double t) { return diffusion_spectral(sys, bath, t, tol); };
    }
    c.diffusion_integral = [=](double t) { return decoherence_exponent(sys, bath, t, tol); };
    return c;
}

std::string to_string(ExponentMethod m) {
    return m == ExponentMethod::closed_zero_T ? "closed_zero_T" : "quadrature";
}

double diffusion_coefficient(const SystemParams& sys, const BathParams& bath, double t,
                             const quad::Tolerance& tol) {
    require_time(t);
    sys.validate();
    bath.validate();
    if (t == 0.0) {
        return 0.0;
    }
    auto integrand = [&](double s) {
        return noise_kernel(sys, bath, s, tol) * std::cos(sys.frequency * s);
    };
    const double panel = pi / (2.0 * (bath.cutoff + sys.frequency));
    return quad::integrate(integrand, 0.0, t, tol, panel).value;
}

double diffusion_spectral(const SystemParams& sys, const BathParams& bath, double t,
                          const quad::Tolerance& tol) {
    require_time(t);
    if (t == 0.0) {
        return 0.0;
    }
    return spectral_integral(sys, bath, t, tol, [t](double k) { return t * sinc(k * t); });
}

double diffusion_zero_T_free(const SystemParams& sys, const BathParams& bath, double t) {
    require_time(t);
    sys.validate();
    bath.validate();
    const double scale = 2.0 * sys.mass * bath.gamma / pi;
    const double u = bath.cutoff * t;
    if (u < 1e-4) {
        return scale * bath.cutoff * (u / 2.0) * (1.0 - u * u / 12.0);
    }
    // 1 - cos u = 2 sin^2(u/2)
    const double h = std::sin(0.5 * u);
    return scale * 2.0 * h * h / t;
}

double exponent_closed_zero_T(const SystemParams& sys, const BathParams& bath, double t) {
    require_time(t);
    sys.validate();
    bath.validate();
    const double scale = 2.0 * sys.mass * bath.gamma / pi;
    const double u = bath.cutoff * t;
    if (u < 1e-4) {
        return scale * u * u / 4.0;
    }
    // ln(u) + gamma_E - Ci(u), summed without cancellation at small u
    return scale * entire_cosine_integral(u);
}

double decoherence_exponent_quadrature(const SystemParams& sys, const BathParams& bath, double t,
                                       const quad::Tolerance& tol) {
    require_time(t);
    if (t == 0.0) {
        return 0.0;
    }
    return spectral_integral(sys, bath, t, tol, [t](double k) {
        // (1 - cos(k t)) / k^2 = (t^2 / 2) sinc^2(k t / 2)
        const double sc = sinc(0.5 * k * t);
        return 0.5 * t * t * sc * sc;
    });
}

double decoherence_exponent(const SystemParams& sys, const BathParams& bath, double t,
                            const quad::Tolerance& tol) {
    if (closed_form_applies(sys, bath)) {
        return exponent_closed_zero_T(sys, bath, t);
    }
    return decoherence_exponent_quadrature(sys, bath, t, tol);
}

double alpha_theory(const SystemParams& sys, const BathParams& bath, double dx) {
    sys.validate();
    bath.validate();
    if (!(dx >= 0.0) || !std::isfinite(dx)) {
        throw std::invalid_argument("separation must be finite and nonnegative");
    }
    return 2.0 / (pi * sys.hbar) * sys.mass * bath.gamma * dx * dx;
}

ExponentTrace exponent_trace(const SystemParams& sys, const BathParams& bath,
                             std::span<const double> t_grid, const quad::Tolerance& tol) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
            throw std::invalid_argument("exponent t-grid must be nonnegative and strictly increasing");
        }
    }
    ExponentTrace trace;
    trace.method = closed_form_applies(sys, bath) ? ExponentMethod::closed_zero_T
                                                  : ExponentMethod::quadrature;
    trace.t_grid.assign(t_grid.begin(), t_grid.end());
    trace.theta.resize(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) {
        trace.theta[i] = decoherence_exponent(sys, bath, t_grid[i], tol);
    });
    return trace;
}

}  // namespace qbm
