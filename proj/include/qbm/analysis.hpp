// analysis.hpp — coherence observables and decay-law fits

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qbm/evolution.hpp"
#include "qbm/params.hpp"

namespace qbm {

// 2|rho(x+, x-)| / (rho(x+, x+) + rho(x-, x-)) at x+- = center +- d/2, bilinearly
// interpolated. d = 0 returns 1 by convention. Throws if a centre lies off the grid.
double fringe_visibility(const DensityGrid& rho, const CatStateSpec& spec);

enum class MeasureKind { fringe_visibility, offdiag_factor };

std::string to_string(MeasureKind k);

// Coherence values are held as logarithms so deep zero-temperature decays and fast
// high-temperature ones never underflow.
struct CoherenceTrace {
    std::vector<double> times;
    std::vector<double> log_values;
    MeasureKind kind{MeasureKind::offdiag_factor};

    std::size_t size() const noexcept { return times.size(); }
    double value(std::size_t i) const;

    // Both throw std::invalid_argument unless times are positive and strictly increasing
    // and (for from_values) every value is positive.
    static CoherenceTrace from_values(std::span<const double> times, std::span<const double> values,
                                      MeasureKind kind);
    static CoherenceTrace from_logs(std::span<const double> times, std::span<const double> log_values,
                                    MeasureKind kind);
};

inline constexpr std::size_t min_fit_points = 8;

struct PowerLawFit {
    double alpha_fit{};   // minus the log-log slope
    double intercept{};   // ln C at t = 1
    double r_squared{};
    TimeWindow window{};
    std::size_t n_points{};
};

struct ExponentialFit {
    double rate{};
    double intercept{};   // ln C at t = 0
    double r_squared{};
    TimeWindow window{};
    std::size_t n_points{};
};

// Ordinary least squares through (ln t, ln C) using the samples with t in the closed
// window. Throws std::invalid_argument with fewer than 8 samples.
PowerLawFit fit_power_law(const CoherenceTrace& trace, TimeWindow window);

// Ordinary least squares through (t, ln C).
ExponentialFit fit_exponential(const CoherenceTrace& trace, TimeWindow window);

enum class DecayModel { power_law, exponential, undetermined };

std::string to_string(DecayModel m);

inline constexpr double model_margin = 0.01;

struct ModelSelection {
    DecayModel model{DecayModel::undetermined};
    PowerLawFit power_law;
    ExponentialFit exponential;
    double delta_r_squared{};  // r2(power law) - r2(exponential)
};

// Higher r^2 wins; undetermined when the two differ by less than 0.01.
ModelSelection model_select(const CoherenceTrace& trace, TimeWindow window);

// n points logarithmically spaced on [lo, hi], both ends included.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

// Log grid with at least per_decade points per decade (and never fewer than 2 in total).
std::vector<double> log_spaced_per_decade(double lo, double hi, double per_decade = 32.0);

// exp(-dx^2 Theta_D(t) / hbar) on the given times, stored as its logarithm.
CoherenceTrace dephasing_trace(const SystemParams& sys, const BathParams& bath, double dx,
                               std::span<const double> times);

}  // namespace qbm
