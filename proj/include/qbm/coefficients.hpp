// coefficients.hpp — weak-coupling master-equation coefficients and the decoherence exponent
//
// Only the diffusion coefficient D(t) is known in closed or quadrature form. The
// dissipation Gamma(t), anomalous diffusion A(t) and frequency shift dOmega(t)^2
// default to zero and may be supplied by the caller for experiments.

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qbm/kernels.hpp"
#include "qbm/params.hpp"
#include "qbm/quadrature.hpp"

namespace qbm {

using TimeFunction = std::function<double(double)>;

struct CoefficientSet {
    TimeFunction diffusion;   // D(t)
    TimeFunction dissipation; // Gamma(t)
    TimeFunction anomalous;   // A(t)
    TimeFunction freq_shift;  // dOmega(t)^2

    // Optional int_0^t D. When set, the solver propagates the diffusion term with it
    // exactly instead of integrating D numerically over each step.
    TimeFunction diffusion_integral;

    static CoefficientSet zero();
};

// D(t) from the weak-coupling kernel; the other three coefficients are zero.
CoefficientSet weak_coupling_coefficients(const SystemParams& sys, const BathParams& bath,
                                          const quad::Tolerance& tol = default_tolerance);

enum class ExponentMethod { closed_zero_T, quadrature };

std::string to_string(ExponentMethod m);

struct ExponentTrace {
    std::vector<double> t_grid;
    std::vector<double> theta;
    ExponentMethod method{ExponentMethod::quadrature};
};

// D(t) = int_0^t nu(s) cos(Omega s) ds, integrated in s over the kernel module's nu.
// At T > 0 this nests a frequency quadrature inside the time quadrature.
double diffusion_coefficient(const SystemParams& sys, const BathParams& bath, double t,
                             const quad::Tolerance& tol = default_tolerance);

// The same D(t) with the time integral done analytically first:
// (2/pi) M gamma int_0^Lambda w(omega) [sin((omega-Omega)t)/(omega-Omega) + (+)] / 2 d omega.
double diffusion_spectral(const SystemParams& sys, const BathParams& bath, double t,
                          const quad::Tolerance& tol = default_tolerance);

// T = 0, Omega = 0: D(t) = (2 M gamma / pi)(1 - cos Lambda t)/t.
double diffusion_zero_T_free(const SystemParams& sys, const BathParams& bath, double t);

// Theta_D(t) = int_0^t D(t') dt'. Closed form at T = 0, Omega = 0; quadrature otherwise.
double decoherence_exponent(const SystemParams& sys, const BathParams& bath, double t,
                            const quad::Tolerance& tol = default_tolerance);

// Theta_D by a single frequency quadrature of
// (2/pi) M gamma w(omega) [(1 - cos((omega-Omega)t))/(omega-Omega)^2 + (+)] / 2.
double decoherence_exponent_quadrature(const SystemParams& sys, const BathParams& bath, double t,
                                       const quad::Tolerance& tol = default_tolerance);

// (2 M gamma / pi) [ln(Lambda t) + gamma_E - Ci(Lambda t)].
double exponent_closed_zero_T(const SystemParams& sys, const BathParams& bath, double t);

// alpha = (2 / (pi hbar)) M gamma dx^2. Temperature does not enter.
double alpha_theory(const SystemParams& sys, const BathParams& bath, double dx);

ExponentTrace exponent_trace(const SystemParams& sys, const BathParams& bath,
                             std::span<const double> t_grid,
                             const quad::Tolerance& tol = default_tolerance);

}  // namespace qbm
