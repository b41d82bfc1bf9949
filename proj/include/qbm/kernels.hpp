// kernels.hpp — noise kernel nu(s) of the Ohmic bath at arbitrary temperature

#pragma once

#include <span>
#include <string>
#include <vector>

#include "qbm/params.hpp"
#include "qbm/quadrature.hpp"

namespace qbm {

enum class KernelMethod { closed_zero_T, closed_high_T, quadrature };

std::string to_string(KernelMethod m);
KernelMethod kernel_method_from_string(const std::string& name);

struct KernelTrace {
    std::vector<double> s_grid;
    std::vector<double> values;
    KernelMethod method{KernelMethod::quadrature};
};

// Default tolerance for every quadrature in the kernel and coefficient modules.
inline constexpr quad::Tolerance default_tolerance{1e-10, 1e-8};

// nu(s) = (2/pi) M gamma int_0^Lambda omega coth(beta hbar omega / 2) cos(omega s) d omega.
// T = 0 uses the closed form; T > 0 integrates numerically. Even in s.
double noise_kernel(const SystemParams& sys, const BathParams& bath, double s,
                    const quad::Tolerance& tol = default_tolerance);

// The frequency integral above evaluated numerically at any temperature (coth -> 1 at T = 0).
double noise_kernel_quadrature(const SystemParams& sys, const BathParams& bath, double s,
                               const quad::Tolerance& tol = default_tolerance);

// (2 M gamma / pi) [Lambda sin(Lambda s)/s + (cos(Lambda s) - 1)/s^2], nu0(0) = M gamma Lambda^2 / pi.
double noise_kernel_zero_T_closed(const SystemParams& sys, const BathParams& bath, double s);

// coth(x) ~ 1/x: (4 M gamma kT / (pi hbar)) sin(Lambda s)/s. Valid only for beta hbar Lambda << 1.
double noise_kernel_high_T_closed(const SystemParams& sys, const BathParams& bath, double s);

// omega coth(beta hbar omega / 2), or omega at T = 0.
double thermal_weight(const SystemParams& sys, const BathParams& bath, double omega);

// Samples are independent; the trace is filled in parallel when threads are available.
KernelTrace kernel_trace(const SystemParams& sys, const BathParams& bath,
                         std::span<const double> s_grid, KernelMethod method,
                         const quad::Tolerance& tol = default_tolerance);

}  // namespace qbm
