// params.cpp — parameter validation, timescales and regime checks

#include "qbm/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qbm {

namespace {

void require(bool ok, const char* message) {
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

}  // namespace

void SystemParams::validate() const {
    require(std::isfinite(mass) && mass > 0.0, "mass must be positive");
    require(std::isfinite(frequency) && frequency >= 0.0, "frequency must be nonnegative");
    require(std::isfinite(hbar) && hbar > 0.0, "hbar must be positive");
}

void BathParams::validate() const {
    require(std::isfinite(gamma) && gamma > 0.0, "gamma must be positive");
    require(std::isfinite(cutoff) && cutoff > 0.0, "cutoff must be positive");
    require(std::isfinite(kT) && kT >= 0.0, "kT must be nonnegative");
}

std::string to_string(Regime r) {
    switch (r) {
    case Regime::late_time_zero_T: return "late_time_zero_T";
    case Regime::high_T_markovian: return "high_T_markovian";
    case Regime::unclassified: return "unclassified";
    }
    return "unclassified";
}

Timescales derive_timescales(const SystemParams& sys, const BathParams& bath) {
    sys.validate();
    bath.validate();
    Timescales ts;
    ts.tau_relax = 1.0 / bath.gamma;
    ts.tau_memory = 1.0 / bath.cutoff;
    ts.tau_thermal = bath.zero_temperature() ? infinity : sys.hbar / bath.kT;
    ts.tau_system = sys.frequency == 0.0 ? infinity : 1.0 / sys.frequency;
    return ts;
}

double coherence_length(const SystemParams& sys, const BathParams& bath) {
    sys.validate();
    bath.validate();
    return std::sqrt(sys.hbar / (sys.mass * bath.gamma));
}

double thermal_wavelength(const SystemParams& sys, const BathParams& bath) {
    sys.validate();
    bath.validate();
    if (bath.zero_temperature()) {
        throw std::domain_error("thermal wavelength diverges at absolute zero");
    }
    return sys.hbar / std::sqrt(2.0 * sys.mass * bath.kT);
}

double decoherence_time(const SystemParams& sys, const BathParams& bath, double dx) {
    if (bath.zero_temperature()) {
        throw std::domain_error(
            "decoherence time undefined at absolute zero; use power-law exponent instead");
    }
    require(std::isfinite(dx) && dx > 0.0, "separation must be positive");
    const double ratio = thermal_wavelength(sys, bath) / dx;
    return ratio * ratio / bath.gamma;
}

RegimeReport classify_regime(const Timescales& ts, TimeWindow window) {
    if (!(window.lo > 0.0) || !(window.hi > window.lo)) {
        throw std::invalid_argument("regime window must satisfy 0 < t_lo < t_hi");
    }
    namespace f = regime_factors;
    RegimeReport report;
    report.window = window;
    auto& s = report.satisfied;
    s.relaxed = window.lo >= f::relaxed * ts.tau_relax;
    s.memory_lost = window.lo >= f::memory * ts.tau_memory;
    s.free_particle = window.hi <= f::free_particle * ts.tau_system;
    s.zero_temperature = std::isinf(ts.tau_thermal);
    s.thermal_fast = ts.tau_thermal <= f::thermal * ts.tau_memory;

    if (s.zero_temperature && s.relaxed && s.memory_lost && s.free_particle) {
        report.label = Regime::late_time_zero_T;
    } else if (s.thermal_fast && s.memory_lost && s.free_particle) {
        report.label = Regime::high_T_markovian;
    }

    // gamma t >> 1 and Omega t << 1 at once need gamma >> Omega.
    if (f::relaxed * ts.tau_relax >= f::free_particle * ts.tau_system) {
        report.warnings.emplace_back(
            "no late-time window exists: 2.5/gamma exceeds 0.2/Omega (need gamma >> Omega)");
    }
    if (ts.tau_memory >= ts.tau_relax) {
        report.warnings.emplace_back("memory time 1/Lambda is not shorter than 1/gamma");
    }
    return report;
}

TimeWindow default_fit_window(const Timescales& ts) {
    namespace f = regime_factors;
    return {std::max(f::relaxed * ts.tau_relax, f::memory * ts.tau_memory),
            f::free_particle * ts.tau_system};
}

}  // namespace qbm
