// acceptance.cpp — one pass/fail line per acceptance criterion; exit status 1 if any fails

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "qbm/analysis.hpp"
#include "qbm/coefficients.hpp"
#include "qbm/evolution.hpp"
#include "qbm/kernels.hpp"
#include "qbm/scenario.hpp"

using namespace qbm;

namespace {

// Tolerances, fixed here rather than configurable.
namespace tol {
constexpr double ac1_alpha = 0.05;
constexpr double ac1_r_squared = 0.999;
constexpr double ac1_seconds = 10.0;
constexpr double ac2_ratio = 0.02;
constexpr double ac2_seconds = 30.0;
constexpr double ac3_rate = 0.05;
constexpr double ac3_seconds = 10.0;
constexpr double ac4_kernel = 1e-8;
constexpr double ac4_theta = 1e-6;
constexpr double ac4_seconds = 60.0;
constexpr double ac5_alpha = 0.15;
constexpr double ac5_masked = 1e-6;
constexpr double ac5_seconds = 600.0;
constexpr double ac6_trace = 1e-6;
constexpr double ac6_hermiticity = 1e-8;
constexpr double ac6_spreading = 0.005;
constexpr double ac7_margin = 0.01;
}  // namespace tol

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
    std::printf("%s %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

double rel(double value, double reference) {
    return std::abs(value - reference) / std::abs(reference);
}

const SystemParams ref_sys{1.0, 1e-4, 1.0};
const BathParams cold{0.05, 200.0, 0.0};
const BathParams hot{0.1, 200.0, 50.0};
constexpr double separation = 2.0;

// Traces shared between criteria.
CoherenceTrace ac1_trace;
CoherenceTrace ac3_trace;
TimeWindow ac3_window;

void ac1() {
    const auto t0 = clock_type::now();
    const TimeWindow window{50.0, 2000.0};
    ac1_trace = dephasing_trace(ref_sys, cold, separation, log_spaced(window.lo, window.hi, 64));
    const auto fit = fit_power_law(ac1_trace, window);
    const double elapsed = seconds_since(t0);
    const double alpha = alpha_theory(ref_sys, cold, separation);
    const double err = rel(fit.alpha_fit, alpha);
    report("AC-1", err <= tol::ac1_alpha && fit.r_squared >= tol::ac1_r_squared && elapsed <= tol::ac1_seconds,
           fmt::format("zero-T power law: alpha_fit={:.6f} alpha_theory={:.6f} rel_err={:.4f} (<= {}) "
                       "r2={:.6f} (>= {}) n={} time={:.2f}s (<= {}s)",
                       fit.alpha_fit, alpha, err, tol::ac1_alpha, fit.r_squared, tol::ac1_r_squared,
                       fit.n_points, elapsed, tol::ac1_seconds));
}

void ac2() {
    const auto t0 = clock_type::now();
    auto cfg = default_config(ScenarioKind::separation_sweep);
    cfg.output_dir = (std::filesystem::temp_directory_path() / "qbm_acceptance_sweep").string();
    std::filesystem::remove_all(cfg.output_dir);
    const auto m = run_scenario(cfg);
    const double elapsed = seconds_since(t0);
    double worst = 0.0;
    std::string ratios;
    for (const auto& c : m.checks) {
        if (c.name.rfind("alpha_ratio", 0) == 0) {
            worst = std::max(worst, c.value);
            ratios += fmt::format(" {}={:.5f}", c.name, c.value);
        }
    }
    report("AC-2", m.ok() && worst <= tol::ac2_ratio && elapsed <= tol::ac2_seconds,
           fmt::format("separation sweep d=1,2,4: ratio rel errors{} (<= {}) time={:.2f}s (<= {}s)", ratios,
                       tol::ac2_ratio, elapsed, tol::ac2_seconds));
}

void ac3() {
    const auto t0 = clock_type::now();
    const double tau_d = decoherence_time(ref_sys, hot, separation);
    ac3_window = {5.0 / hot.cutoff, 3.0 * tau_d};
    ac3_trace = dephasing_trace(ref_sys, hot, separation, log_spaced(ac3_window.lo, ac3_window.hi, 64));
    const auto sel = model_select(ac3_trace, ac3_window);
    const double elapsed = seconds_since(t0);
    const double rate_theory = 2.0 * ref_sys.mass * hot.gamma * hot.kT * separation * separation;
    const double err = rel(sel.exponential.rate, rate_theory);
    const double consistency = std::abs(sel.exponential.rate * tau_d - 1.0);
    report("AC-3",
           err <= tol::ac3_rate && consistency <= tol::ac3_rate && sel.model == DecayModel::exponential &&
               elapsed <= tol::ac3_seconds,
           fmt::format("high-T exponential: rate={:.4f} theory={:.1f} rel_err={:.4f} (<= {}) "
                       "|rate*tau_D-1|={:.4f} (<= {}) model={} window=[{:.4g}, {:.4g}] time={:.2f}s (<= {}s)",
                       sel.exponential.rate, rate_theory, err, tol::ac3_rate, consistency, tol::ac3_rate,
                       to_string(sel.model), ac3_window.lo, ac3_window.hi, elapsed, tol::ac3_seconds));
}

void ac4() {
    const auto t0 = clock_type::now();
    const SystemParams free_sys{1.0, 0.0, 1.0};
    double kernel_err = 0.0;
    const quad::Tolerance tight{1e-14, 1e-13};
    for (double s : log_spaced(1e-3 / cold.cutoff, 1e3 / cold.cutoff, 100)) {
        const double closed = noise_kernel_zero_T_closed(free_sys, cold, s);
        const double brute = noise_kernel_quadrature(free_sys, cold, s, tight);
        kernel_err = std::max(kernel_err, rel(closed, brute));
    }
    double theta_err = 0.0;
    for (double t : log_spaced(0.05, 2000.0, 20)) {
        const double closed = exponent_closed_zero_T(free_sys, cold, t);
        const double brute = oracle::theta_zero_T(1.0, cold.gamma, cold.cutoff, t);
        theta_err = std::max(theta_err, rel(closed, brute));
    }
    const double elapsed = seconds_since(t0);
    report("AC-4", kernel_err <= tol::ac4_kernel && theta_err <= tol::ac4_theta && elapsed <= tol::ac4_seconds,
           fmt::format("closed forms vs brute force: kernel max rel err={:.3e} (<= {}) over 100 s, "
                       "Theta max rel err={:.3e} (<= {}) over 20 t, time={:.2f}s (<= {}s)",
                       kernel_err, tol::ac4_kernel, theta_err, tol::ac4_theta, elapsed, tol::ac4_seconds));
}

void ac5_ac6() {
    const auto t0 = clock_type::now();
    // lambda_q = sqrt(hbar / M gamma) = 0.2, d = 10 lambda_q
    const SystemParams sys{1.0, 0.0, 1.0};
    const BathParams bath{25.0, 2500.0, 0.0};
    const CatStateSpec cat{10.0 * coherence_length(sys, bath), 0.25, 0.0};
    const std::size_t n = 256;
    const auto rho0 = init_cat_state(cat, n, aligned_extent(cat, n, cat.separation + 22.0 * cat.width));
    const TimeWindow window = {default_fit_window(derive_timescales(sys, bath)).lo, 0.4};
    EvolveConfig cfg;
    cfg.dt = default_time_step(sys, rho0);
    cfg.t_end = window.hi;
    cfg.record_every = 50;
    const auto coeffs = weak_coupling_coefficients(sys, bath);
    const auto snaps = evolve_full(rho0, sys, bath, coeffs, cfg,
                                   [&](const DensityGrid& g) { return fringe_visibility(g, cat); });

    std::vector<double> t, v, exact;
    double trace_drift = 0.0;
    double herm = 0.0;
    for (const auto& s : snaps) {
        trace_drift = std::max(trace_drift, std::abs(s.trace - 1.0));
        herm = std::max(herm, s.herm_residual);
        if (s.time >= window.lo && s.time <= window.hi && s.observable > 0.0) {
            t.push_back(s.time);
            v.push_back(s.observable);
            exact.push_back(oracle::visibility_free(s.time, sys.mass, bath.gamma, bath.cutoff, sys.hbar,
                                                    cat.width, cat.separation));
        }
    }
    const double alpha = alpha_theory(sys, bath, cat.separation);
    double alpha_fit = std::nan("");
    double r2 = std::nan("");
    std::string fit_note;
    try {
        const auto fit = fit_power_law(CoherenceTrace::from_values(t, v, MeasureKind::fringe_visibility), window);
        alpha_fit = fit.alpha_fit;
        r2 = fit.r_squared;
    } catch (const std::exception& e) {
        fit_note = std::string(" fit error: ") + e.what();
    }
    // exact kinetic-plus-diffusion solution on the same times, for diagnosis
    double exact_alpha = std::nan("");
    std::vector<double> et, ev;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (exact[i] > 0.0) {
            et.push_back(t[i]);
            ev.push_back(exact[i]);
        }
    }
    if (et.size() >= min_fit_points) {
        exact_alpha = fit_power_law(CoherenceTrace::from_values(et, ev, MeasureKind::fringe_visibility), window).alpha_fit;
    }

    EvolveConfig masked = cfg;
    masked.terms.kinetic = false;
    masked.terms.potential = false;
    masked.record_every = 1u << 30;
    masked.snapshot_every = 1u << 30;
    const auto last = evolve_full(rho0, sys, bath, coeffs, masked).back();
    const auto reference = evolve_dephasing(rho0, sys, bath, last.time);
    const double masked_diff = (last.grid->values() - reference.values()).cwiseAbs().maxCoeff();
    const double elapsed = seconds_since(t0);

    const double err = rel(alpha_fit, alpha);
    report("AC-5", err <= tol::ac5_alpha && masked_diff <= tol::ac5_masked && elapsed <= tol::ac5_seconds,
           fmt::format("full solver vs dephasing (d=10 lambda_q={}, n={}, {} steps): visibility slope "
                       "alpha_fit={:.4g} alpha_theory={:.4f} rel_err={:.3g} (<= {}) r2={:.3g}{}; "
                       "exact kinetic+diffusion solution slope={:.4g}; masked max-norm={:.3e} (<= {}) "
                       "time={:.1f}s (<= {}s)",
                       cat.separation, n, snaps.back().step, alpha_fit, alpha, err, tol::ac5_alpha, r2, fit_note,
                       exact_alpha, masked_diff, tol::ac5_masked, elapsed, tol::ac5_seconds));

    // free-particle spreading on a resolved grid
    const double sigma = 0.5;
    const auto gauss = init_cat_state({0.0, sigma, 0.0}, 128, 7.9);
    EvolveConfig free_cfg;
    free_cfg.dt = default_time_step(sys, gauss);
    free_cfg.t_end = 0.5;
    free_cfg.record_every = 1u << 30;
    free_cfg.snapshot_every = 1u << 30;
    const auto spread = evolve_full(gauss, sys, {}, CoefficientSet::zero(), free_cfg).back();
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < spread.grid->size(); ++i) {
        const double x = spread.grid->coordinate(i);
        const double p = (*spread.grid)(i, i).real();
        m0 += p;
        m1 += p * x;
        m2 += p * x * x;
    }
    const double var = m2 / m0 - (m1 / m0) * (m1 / m0);
    const double var_exact = sigma * sigma + std::pow(sys.hbar * free_cfg.t_end / (2.0 * sys.mass * sigma), 2);
    const double spread_err = rel(var, var_exact);
    report("AC-6",
           trace_drift <= tol::ac6_trace && herm <= tol::ac6_hermiticity && spread_err <= tol::ac6_spreading,
           fmt::format("solver conservation over the AC-5 run: max|trace-1|={:.3e} (<= {}) "
                       "max hermiticity residual={:.3e} (<= {}); free Gaussian variance rel err={:.3e} (<= {})",
                       trace_drift, tol::ac6_trace, herm, tol::ac6_hermiticity, spread_err, tol::ac6_spreading));
}

void ac7() {
    const auto cold_sel = model_select(ac1_trace, {50.0, 2000.0});
    const auto hot_sel = model_select(ac3_trace, ac3_window);
    const bool pass = cold_sel.model == DecayModel::power_law && cold_sel.delta_r_squared >= tol::ac7_margin &&
                      hot_sel.model == DecayModel::exponential && -hot_sel.delta_r_squared >= tol::ac7_margin;
    report("AC-7", pass,
           fmt::format("dichotomy: AC-1 trace -> {} (dr2={:.4f}), AC-3 trace -> {} (dr2={:.4f}); margin >= {}",
                       to_string(cold_sel.model), cold_sel.delta_r_squared, to_string(hot_sel.model),
                       -hot_sel.delta_r_squared, tol::ac7_margin));
}

void guarded(const char* id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

}  // namespace

int main() {
    guarded("AC-1", ac1);
    guarded("AC-2", ac2);
    guarded("AC-3", ac3);
    guarded("AC-4", ac4);
    guarded("AC-5/AC-6", ac5_ac6);
    guarded("AC-7", ac7);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
