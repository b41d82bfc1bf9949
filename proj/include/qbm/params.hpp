// params.hpp — physical parameters, derived timescales and regime classification

#pragma once

#include <limits>
#include <string>
#include <vector>

namespace qbm {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// System oscillator. Nondimensional units; hbar = mass = 1 unless overridden.
struct SystemParams {
    double mass{1.0};       // M
    double frequency{0.0};  // Omega, the confining (infrared) frequency
    double hbar{1.0};

    void validate() const;
};

// Ohmic environment: gamma = Gamma / M, sharp cutoff Lambda, thermal energy k_B T.
// kT == 0 is absolute zero, represented exactly.
struct BathParams {
    double gamma{0.05};
    double cutoff{200.0};
    double kT{0.0};

    bool zero_temperature() const noexcept { return kT == 0.0; }
    void validate() const;
};

struct Timescales {
    double tau_relax{};    // 1 / gamma
    double tau_memory{};   // 1 / Lambda
    double tau_thermal{};  // hbar / kT, infinite at T = 0
    double tau_system{};   // 1 / Omega, infinite at Omega = 0
};

struct TimeWindow {
    double lo{};
    double hi{};
};

enum class Regime { late_time_zero_T, high_T_markovian, unclassified };

std::string to_string(Regime r);

// Ordering constraints "Omega^-1 > t >> tau > Lambda^-1" with the factors below.
namespace regime_factors {
inline constexpr double relaxed = 2.5;       // t >> tau        -> t >= 2.5 tau
inline constexpr double memory = 10.0;       // t >> 1/Lambda   -> t >= 10 / Lambda
inline constexpr double free_particle = 0.2; // t < 1/Omega     -> t <= 0.2 / Omega
inline constexpr double thermal = 0.1;       // hbar beta << 1/Lambda -> tau_beta <= 0.1 / Lambda
inline constexpr double separation = 2.5;    // |x - x'| >> lambda_q
}  // namespace regime_factors

struct RegimeReport {
    TimeWindow window;
    struct Flags {
        bool relaxed{};         // t_lo >= 2.5 tau
        bool memory_lost{};     // t_lo >= 10 / Lambda
        bool free_particle{};   // t_hi <= 0.2 / Omega
        bool zero_temperature{};
        bool thermal_fast{};    // tau_beta <= 0.1 / Lambda
    } satisfied;
    Regime label{Regime::unclassified};
    std::vector<std::string> warnings;
};

Timescales derive_timescales(const SystemParams& sys, const BathParams& bath);

// lambda_q = sqrt(hbar / (M gamma)): zero-temperature coherence length.
double coherence_length(const SystemParams& sys, const BathParams& bath);

// hbar / sqrt(2 M kT). Throws at T = 0.
double thermal_wavelength(const SystemParams& sys, const BathParams& bath);

// tau_D = (lambda_Th / dx)^2 / gamma. Undefined at absolute zero.
double decoherence_time(const SystemParams& sys, const BathParams& bath, double dx);

RegimeReport classify_regime(const Timescales& ts, TimeWindow window);

// [max(2.5 tau, 10 / Lambda), 0.2 / Omega]; the upper end is infinite when Omega = 0.
TimeWindow default_fit_window(const Timescales& ts);

}  // namespace qbm
