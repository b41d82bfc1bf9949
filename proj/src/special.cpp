// special.cpp

#include "qbm/special.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qbm {

namespace {

constexpr double series_limit = 4.0;

struct Auxiliary {
    double f;
    double g;
};

// e^{ix} E1(ix) = g(x) - i f(x), evaluated by the modified Lentz continued fraction
// E1(z) = e^{-z} / (z + 1 - 1^2/(z + 3 - 2^2/(z + 5 - ...))). Converges quickly for x > 2.
Auxiliary auxiliary_fg(double x) {
    using C = std::complex<double>;
    constexpr double tiny = 1e-300;
    constexpr double eps = 4.0 * std::numeric_limits<double>::epsilon();
    const C z{0.0, x};
    C b = z + 1.0;
    C c = 1.0 / tiny;
    C d = 1.0 / b;
    C h = d;
    for (int i = 1; i < 1000; ++i) {
        const double a = -static_cast<double>(i) * static_cast<double>(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const C delta = c * d;
        h *= delta;
        if (std::abs(delta.real() - 1.0) + std::abs(delta.imag()) < eps) {
            return {-h.imag(), h.real()};
        }
    }
    throw std::runtime_error("cosine/sine integral continued fraction did not converge");
}

// Sum_{k>=1} (-1)^k x^{2k} / (2k (2k)!) and Sum_{k>=0} (-1)^k x^{2k+1} / ((2k+1)(2k+1)!).
double ci_tail_series(double x) {
    const double x2 = x * x;
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) {
        term *= -x2 / ((2.0 * k - 1.0) * (2.0 * k));
        const double add = term / (2.0 * k);
        sum += add;
        if (std::abs(add) < std::numeric_limits<double>::epsilon() * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

double si_series(double x) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int k = 1; k < 100; ++k) {
        term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
        const double add = term / (2.0 * k + 1.0);
        sum += add;
        if (std::abs(add) < std::numeric_limits<double>::epsilon() * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

}  // namespace

double cosine_integral(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("cosine integral requires x > 0");
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    if (x <= series_limit) {
        return euler_gamma + std::log(x) + ci_tail_series(x);
    }
    const auto [f, g] = auxiliary_fg(x);
    return f * std::sin(x) - g * std::cos(x);
}

double entire_cosine_integral(double x) {
    if (!(x >= 0.0)) {
        throw std::domain_error("entire cosine integral requires x >= 0");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (x <= series_limit) {
        return -ci_tail_series(x);
    }
    return euler_gamma + std::log(x) - cosine_integral(x);
}

double sine_integral(double x) {
    if (std::isnan(x)) {
        return x;
    }
    const double ax = std::abs(x);
    double si;
    if (std::isinf(ax)) {
        si = std::numbers::pi / 2.0;
    } else if (ax <= series_limit) {
        si = si_series(ax);
    } else {
        const auto [f, g] = auxiliary_fg(ax);
        si = std::numbers::pi / 2.0 - f * std::cos(ax) - g * std::sin(ax);
    }
    return x < 0.0 ? -si : si;
}

double x_coth_x(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        return 1.0 + ax * ax / 3.0;
    }
    if (ax > 40.0) {
        return ax;  // coth saturates to 1 in double precision
    }
    return ax / std::tanh(ax);
}

}  // namespace qbm
