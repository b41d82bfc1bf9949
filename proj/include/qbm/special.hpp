// special.hpp — cosine/sine integrals and the thermal occupation factor

#pragma once

namespace qbm {

inline constexpr double euler_gamma = 0.5772156649015329;

// Ci(x) = gamma_E + ln x + int_0^x (cos u - 1)/u du. Power series for x <= 4,
// auxiliary functions f, g (Ci = f sin x - g cos x) beyond. Throws for x <= 0.
double cosine_integral(double x);

// Cin(x) = int_0^x (1 - cos u)/u du = gamma_E + ln x - Ci(x), summed directly for x <= 4
// so small arguments do not cancel. Cin(0) = 0; throws for x < 0.
double entire_cosine_integral(double x);

// Si(x) = int_0^x sin(u)/u du, odd in x.
double sine_integral(double x);

// x coth(x), even, equal to 1 at x = 0. Uses 1 + x^2/3 near the origin.
double x_coth_x(double x);

}  // namespace qbm
