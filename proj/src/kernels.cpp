// kernels.cpp — closed forms and oscillation-aware quadrature for nu(s)

#include "qbm/kernels.hpp"

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

// Largest panel for an integrand oscillating like cos(omega s) in omega.
double oscillation_panel(double s) {
    return s == 0.0 ? std::numeric_limits<double>::infinity() : pi / (2.0 * s);
}

}  // namespace

std::string to_string(KernelMethod m) {
    switch (m) {
    case KernelMethod::closed_zero_T: return "closed_zero_T";
    case KernelMethod::closed_high_T: return "closed_high_T";
    case KernelMethod::quadrature: return "quadrature";
    }
    return "quadrature";
}

KernelMethod kernel_method_from_string(const std::string& name) {
    if (name == "closed_zero_T") return KernelMethod::closed_zero_T;
    if (name == "closed_high_T") return KernelMethod::closed_high_T;
    if (name == "quadrature") return KernelMethod::quadrature;
    throw std::invalid_argument("unknown kernel method '" + name + "'");
}

double thermal_weight(const SystemParams& sys, const BathParams& bath, double omega) {
    if (bath.zero_temperature()) {
        return omega;
    }
    // omega coth(x) with x = beta hbar omega / 2, written as (2 kT / hbar) x coth(x)
    const double x = sys.hbar * omega / (2.0 * bath.kT);
    return 2.0 * bath.kT / sys.hbar * x_coth_x(x);
}

double noise_kernel_zero_T_closed(const SystemParams& sys, const BathParams& bath, double s) {
    sys.validate();
    bath.validate();
    s = std::abs(s);
    const double lam = bath.cutoff;
    const double scale = 2.0 * sys.mass * bath.gamma / pi;
    const double u = lam * s;
    if (u < 1e-4) {
        const double u2 = u * u;
        return sys.mass * bath.gamma * lam * lam / pi * (1.0 - u2 / 4.0 + u2 * u2 / 72.0);
    }
    // cos u - 1 = -2 sin^2(u/2) avoids cancellation at small u
    const double h = std::sin(0.5 * u);
    return scale * (lam * std::sin(u) / s - 2.0 * h * h / (s * s));
}

double noise_kernel_high_T_closed(const SystemParams& sys, const BathParams& bath, double s) {
    sys.validate();
    bath.validate();
    s = std::abs(s);
    const double amplitude = 4.0 * sys.mass * bath.gamma * bath.kT / (pi * sys.hbar);
    const double u = bath.cutoff * s;
    if (u < 1e-4) {
        return amplitude * bath.cutoff * (1.0 - u * u / 6.0);
    }
    return amplitude * std::sin(u) / s;
}

double noise_kernel_quadrature(const SystemParams& sys, const BathParams& bath, double s,
                               const quad::Tolerance& tol) {
    const auto density = SpectralDensity::ohmic(sys, bath);
    s = std::abs(s);
    auto integrand = [&](double omega) {
        return thermal_weight(sys, bath, omega) * std::cos(omega * s);
    };
    const auto r = quad::integrate(integrand, 0.0, density.cutoff, tol, oscillation_panel(s));
    return density.slope() * r.value;
}

double noise_kernel(const SystemParams& sys, const BathParams& bath, double s,
                    const quad::Tolerance& tol) {
    if (bath.zero_temperature()) {
        return noise_kernel_zero_T_closed(sys, bath, s);
    }
    return noise_kernel_quadrature(sys, bath, s, tol);
}

KernelTrace kernel_trace(const SystemParams& sys, const BathParams& bath,
                         std::span<const double> s_grid, KernelMethod method,
                         const quad::Tolerance& tol) {
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (!(s_grid[i] >= 0.0) || (i > 0 && !(s_grid[i] > s_grid[i - 1]))) {
            throw std::invalid_argument("kernel s-grid must be nonnegative and strictly increasing");
        }
    }
    if (method == KernelMethod::closed_zero_T && !bath.zero_temperature()) {
        throw std::invalid_argument("closed zero-temperature kernel requested at kT > 0");
    }
    KernelTrace trace;
    trace.method = method;
    trace.s_grid.assign(s_grid.begin(), s_grid.end());
    trace.values.resize(s_grid.size());
    parallel_for(s_grid.size(), [&](std::size_t i) {
        const double s = s_grid[i];
        switch (method) {
        case KernelMethod::closed_zero_T:
            trace.values[i] = noise_kernel_zero_T_closed(sys, bath, s);
            break;
        case KernelMethod::closed_high_T:
            trace.values[i] = noise_kernel_high_T_closed(sys, bath, s);
            break;
        case KernelMethod::quadrature:
            trace.values[i] = noise_kernel_quadrature(sys, bath, s, tol);
            break;
        }
    });
    return trace;
}

}  // namespace qbm
