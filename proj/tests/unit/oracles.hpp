// oracles.hpp — independent reference values for the tests, built on Boost quadrature
// rather than the library's own integrator

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

constexpr double pi = std::numbers::pi;

// Sum of 61-point Gauss-Kronrod panels no wider than `width` over [a, b]. Callers keep the
// panels narrow enough for one rule per panel to reach roundoff.
inline double panels(const std::function<double(double)>& f, double a, double b, double width) {
    using boost::math::quadrature::gauss_kronrod;
    if (b <= a) {
        return 0.0;
    }
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / width));
    const double h = (b - a) / static_cast<double>(n);
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double lo = a + static_cast<double>(k) * h;
        const double hi = k + 1 == n ? b : lo + h;
        const double v = gauss_kronrod<double, 61>::integrate(f, lo, hi, 0);
        // Kahan
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// Cin(x) = int_0^x (1 - cos t)/t dt.
inline double cin(double x) {
    return panels([](double t) { return t < 1e-6 ? t / 2.0 : (1.0 - std::cos(t)) / t; }, 0.0, x, 0.5);
}

// Si(x) = int_0^x sin t / t dt.
inline double si(double x) {
    return panels([](double t) { return t < 1e-8 ? 1.0 : std::sin(t) / t; }, 0.0, x, 0.5);
}

// Ci(x) = gamma_E + ln x - Cin(x).
inline double ci(double x) {
    return 0.57721566490153286 + std::log(x) - cin(x);
}

// nu(s) = (2/pi) M gamma int_0^Lambda w(omega) cos(omega s) d omega with w = omega coth(beta hbar omega/2).
inline double noise_kernel(double mass, double gamma, double cutoff, double kT, double hbar, double s) {
    auto w = [&](double omega) {
        if (kT == 0.0) {
            return omega;
        }
        const double x = hbar * omega / (2.0 * kT);
        return x < 1e-8 ? 2.0 * kT / hbar : omega / std::tanh(x);
    };
    // coth has poles 2 pi kT / hbar off the real axis
    double width = s > 0.0 ? std::min(cutoff, 1.0 / s) : cutoff;
    if (kT > 0.0) {
        width = std::min(width, 2.0 * kT / hbar);
    }
    return 2.0 / pi * mass * gamma *
           panels([&](double omega) { return w(omega) * std::cos(omega * s); }, 0.0, cutoff, width);
}

// Zero-temperature kernel written independently of the library.
inline double nu0(double mass, double gamma, double cutoff, double s) {
    const double u = cutoff * s;
    if (u < 1e-3) {
        return mass * gamma * cutoff * cutoff / pi * (1.0 - u * u / 4.0 + u * u * u * u / 72.0);
    }
    return 2.0 * mass * gamma / pi * (cutoff * std::sin(u) / s + (std::cos(u) - 1.0) / (s * s));
}

// Theta_D(t) = int_0^t D = int_0^t (t - s) nu0(s) ds for Omega = 0 (repeated integration).
inline double theta_zero_T(double mass, double gamma, double cutoff, double t) {
    return panels([&](double s) { return (t - s) * nu0(mass, gamma, cutoff, s); }, 0.0, t, 0.5 / cutoff);
}

// Moments int_0^t D(t') (t - t')^k dt', k = 0, 1, 2, with D = (2 M gamma / pi)(1 - cos Lambda t')/t'.
inline std::vector<double> diffusion_moments(double mass, double gamma, double cutoff, double t) {
    const double c = 2.0 * mass * gamma / pi;
    auto d = [&](double tp) {
        const double u = cutoff * tp;
        return u < 1e-6 ? c * cutoff * u / 2.0 : c * (1.0 - std::cos(u)) / tp;
    };
    std::vector<double> out;
    for (int k = 0; k < 3; ++k) {
        out.push_back(panels([&](double tp) { return d(tp) * std::pow(t - tp, k); }, 0.0, t, 0.5 / cutoff));
    }
    return out;
}

// Exact free-particle solution of d rho/dt = (i hbar/2M)(d_x^2 - d_x'^2) rho - (D(t)/hbar)(x - x')^2 rho
// for the unnormalised cat psi = G(x - d/2) + G(x + d/2), G = exp(-x^2 / 4 sigma^2). Returns
// ln rho at centre-of-mass R = (x + x')/2 and relative coordinate r = x - x'.
inline std::complex<double> log_rho_free(double R, double r, double t, const std::vector<double>& moments,
                                         double mass, double hbar, double sigma, double d) {
    using C = std::complex<double>;
    const double u = hbar / mass;
    const double s2 = sigma * sigma;
    std::vector<C> terms;
    for (double a : {d / 2, -d / 2}) {
        for (double b : {d / 2, -d / 2}) {
            const double m = 0.5 * (a + b);
            const double de = a - b;
            const double A = s2 / 2.0 + u * u * t * t / (8.0 * s2) + u * u * moments[2] / hbar;
            const C B = C(0.0, R - m) + (r - de) * u * t / (4.0 * s2) + 2.0 * r * u * moments[1] / hbar;
            const double Cc = -(r - de) * (r - de) / (8.0 * s2) - r * r * moments[0] / hbar;
            terms.push_back(0.5 * std::log(pi / A) + B * B / (4.0 * A) + Cc);
        }
    }
    double mx = -1e300;
    for (const auto& z : terms) {
        mx = std::max(mx, z.real());
    }
    C sum = 0.0;
    for (const auto& z : terms) {
        sum += std::exp(z - mx);
    }
    return mx + std::log(sum);
}

// Fringe visibility of the exact free-particle solution above.
inline double visibility_free(double t, double mass, double gamma, double cutoff, double hbar, double sigma,
                              double d) {
    const auto mom = diffusion_moments(mass, gamma, cutoff, t);
    const double off = log_rho_free(0.0, d, t, mom, mass, hbar, sigma, d).real();
    const double diag = log_rho_free(d / 2, 0.0, t, mom, mass, hbar, sigma, d).real();
    return std::exp(off - diag);
}

}  // namespace oracle
