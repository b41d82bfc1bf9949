// scenario.cpp

#include "qbm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "qbm/coefficients.hpp"
#include "qbm/parallel.hpp"

namespace qbm {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double alpha_tolerance = 0.05;
constexpr double r_squared_floor = 0.999;
constexpr double ratio_tolerance = 0.02;
constexpr double rate_tolerance = 0.05;
constexpr double full_solver_tolerance = 0.15;
constexpr double masked_tolerance = 1e-6;
constexpr double trace_tolerance = 1e-6;
constexpr double hermiticity_tolerance = 1e-8;

json number_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

double relative_error(double value, double reference) {
    return std::abs(value - reference) / std::abs(reference);
}

void separation_warning(const SystemParams& sys, const BathParams& bath, double d, Manifest& m) {
    const double lq = coherence_length(sys, bath);
    if (d < regime_factors::separation * lq) {
        m.warnings.push_back(fmt::format(
            "approximation regime violated: separation {} is below {} lambda_q = {}", d,
            regime_factors::separation, regime_factors::separation * lq));
    }
}

void regime_warnings(const ScenarioConfig& cfg, TimeWindow window, Regime expected, Manifest& m) {
    const auto report = classify_regime(derive_timescales(cfg.system, cfg.bath), window);
    for (const auto& w : report.warnings) {
        m.warnings.push_back(w);
    }
    if (report.label != expected) {
        m.warnings.push_back(fmt::format("fit window [{}, {}] classified as {}, not {}", window.lo,
                                         window.hi, to_string(report.label), to_string(expected)));
    }
}

std::string trace_csv(const CoherenceTrace& trace) {
    std::vector<double> values(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        values[i] = trace.value(i);
    }
    return csv({"t", "coherence", "log_coherence"}, {trace.times, values, trace.log_values});
}

struct PowerLawRun {
    ModelSelection selection;
    double alpha_theory{};
};

PowerLawRun zero_temperature_run(const ScenarioConfig& cfg, double d, OutputSet& out,
                                 const std::string& prefix) {
    const TimeWindow window{cfg.fit.t_lo, cfg.fit.t_hi};
    const auto times = log_spaced(window.lo, window.hi, cfg.fit.points);
    const auto trace = dephasing_trace(cfg.system, cfg.bath, d, times);
    PowerLawRun run;
    run.selection = model_select(trace, window);
    run.alpha_theory = alpha_theory(cfg.system, cfg.bath, d);
    out.write_text(prefix + "trace.csv", trace_csv(trace));
    out.write_text(prefix + "fit.json",
                   fit_report_json(run.selection, DecayModel::power_law, cfg.system, cfg.bath, d));
    return run;
}

void run_zero_temperature(const ScenarioConfig& cfg, OutputSet& out, Manifest& m) {
    const double d = cfg.cat.separation;
    const TimeWindow window{cfg.fit.t_lo, cfg.fit.t_hi};
    regime_warnings(cfg, window, Regime::late_time_zero_T, m);
    separation_warning(cfg.system, cfg.bath, d, m);
    const auto run = zero_temperature_run(cfg, d, out, "");
    const auto& fit = run.selection.power_law;
    m.checks.push_back(make_check("alpha_rel_err", relative_error(fit.alpha_fit, run.alpha_theory), alpha_tolerance));
    m.checks.push_back(make_check("r_squared", fit.r_squared, r_squared_floor, Comparison::at_least));
    m.checks.push_back(make_check("power_law_margin", run.selection.delta_r_squared, model_margin,
                                  Comparison::at_least));
}

void run_high_temperature(const ScenarioConfig& cfg, OutputSet& out, Manifest& m) {
    const double d = cfg.cat.separation;
    const TimeWindow window{cfg.fit.t_lo, cfg.fit.t_hi};
    regime_warnings(cfg, window, Regime::high_T_markovian, m);
    const auto times = log_spaced(window.lo, window.hi, cfg.fit.points);
    const auto trace = dephasing_trace(cfg.system, cfg.bath, d, times);
    const auto sel = model_select(trace, window);
    out.write_text("trace.csv", trace_csv(trace));
    out.write_text("fit.json", fit_report_json(sel, DecayModel::exponential, cfg.system, cfg.bath, d));

    const double hbar2 = cfg.system.hbar * cfg.system.hbar;
    const double rate_theory = 2.0 * cfg.system.mass * cfg.bath.gamma * cfg.bath.kT * d * d / hbar2;
    const double tau_d = decoherence_time(cfg.system, cfg.bath, d);
    m.checks.push_back(make_check("rate_rel_err", relative_error(sel.exponential.rate, rate_theory), rate_tolerance));
    m.checks.push_back(make_check("rate_tau_d_err", std::abs(sel.exponential.rate * tau_d - 1.0), rate_tolerance));
    m.checks.push_back(make_check("exponential_margin", -sel.delta_r_squared, model_margin, Comparison::at_least));
}

void run_separation_sweep(const ScenarioConfig& cfg, OutputSet& out, Manifest& m) {
    const auto& ds = cfg.sweep.separations;
    regime_warnings(cfg, {cfg.fit.t_lo, cfg.fit.t_hi}, Regime::late_time_zero_T, m);
    std::vector<PowerLawRun> runs(ds.size());
    std::vector<std::string> prefixes(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        separation_warning(cfg.system, cfg.bath, ds[i], m);
        prefixes[i] = fmt::format("run{:02}_d{}/", i, ds[i]);
    }
    // each worker writes only under its own prefix
    std::vector<OutputSet> outputs(ds.size(), OutputSet(out.root()));
    parallel_for(ds.size(), [&](std::size_t i) {
        runs[i] = zero_temperature_run(cfg, ds[i], outputs[i], prefixes[i]);
    });

    std::vector<double> alpha_fit(ds.size());
    std::vector<double> alpha_th(ds.size());
    std::vector<double> ratio_fit(ds.size());
    std::vector<double> ratio_th(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out.adopt(outputs[i]);
        alpha_fit[i] = runs[i].selection.power_law.alpha_fit;
        alpha_th[i] = runs[i].alpha_theory;
        ratio_fit[i] = alpha_fit[i] / alpha_fit[0];
        ratio_th[i] = (ds[i] / ds[0]) * (ds[i] / ds[0]);
        if (i > 0) {
            m.checks.push_back(make_check(fmt::format("alpha_ratio_d{}_over_d{}", ds[i], ds[0]),
                                          relative_error(ratio_fit[i], ratio_th[i]), ratio_tolerance));
        }
        m.checks.push_back(make_check(fmt::format("alpha_rel_err_d{}", ds[i]),
                                      relative_error(alpha_fit[i], alpha_th[i]), alpha_tolerance,
                                      Comparison::at_most, false));
    }
    out.write_text("sweep.csv", csv({"separation", "alpha_fit", "alpha_theory", "ratio_fit", "ratio_theory"},
                                    {ds, alpha_fit, alpha_th, ratio_fit, ratio_th}));
}

void run_full_vs_dephasing(const ScenarioConfig& cfg, OutputSet& out, Manifest& m) {
    const auto& sys = cfg.system;
    const auto& bath = cfg.bath;
    const auto& cat = cfg.cat;
    const double lq = coherence_length(sys, bath);
    const bool in_regime = cat.separation >= regime_factors::separation * lq;
    separation_warning(sys, bath, cat.separation, m);
    const TimeWindow window{cfg.fit.t_lo, cfg.fit.t_hi};
    regime_warnings(cfg, window, Regime::late_time_zero_T, m);

    double extent = cfg.evolve.extent;
    if (extent == 0.0) {
        extent = automatic_extent(cat, cfg.evolve.n);
    }
    const DensityGrid rho0 = init_cat_state(cat, cfg.evolve.n, extent);
    EvolveConfig ec;
    ec.dt = cfg.evolve.dt > 0.0 ? cfg.evolve.dt : default_time_step(sys, rho0);
    ec.t_end = cfg.evolve.t_end;
    ec.record_every = cfg.evolve.record_every;
    ec.snapshot_every = cfg.evolve.snapshot_every;
    const auto coeffs = weak_coupling_coefficients(sys, bath);
    const auto probe = [&](const DensityGrid& g) { return fringe_visibility(g, cat); };
    const auto snaps = evolve_full(rho0, sys, bath, coeffs, ec, probe);

    std::vector<double> t, vis, tr, herm, pur, deph;
    double trace_drift = 0.0;
    double herm_max = 0.0;
    for (const auto& s : snaps) {
        t.push_back(s.time);
        vis.push_back(s.observable);
        tr.push_back(s.trace);
        herm.push_back(s.herm_residual);
        pur.push_back(s.purity);
        deph.push_back(dephasing_factor(sys, bath, cat.separation, s.time));
        trace_drift = std::max(trace_drift, std::abs(s.trace - 1.0));
        herm_max = std::max(herm_max, s.herm_residual);
        if (s.grid) {
            out.write_snapshot(fmt::format("snapshots/step_{:07}.bin", s.step), *s.grid);
        }
    }
    out.write_text("evolve.csv", csv({"t", "visibility", "trace", "herm_residual", "purity"}, {t, vis, tr, herm, pur}));
    out.write_text("dephasing.csv", csv({"t", "dephasing_factor"}, {t, deph}));

    // slope of the full-solver visibility against the dephasing prediction
    std::vector<double> ft, fv;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= window.lo && t[i] <= window.hi && vis[i] > 0.0) {
            ft.push_back(t[i]);
            fv.push_back(vis[i]);
        }
    }
    const double alpha_th = alpha_theory(sys, bath, cat.separation);
    double slope_err = infinity;
    try {
        const auto trace = CoherenceTrace::from_values(ft, fv, MeasureKind::fringe_visibility);
        const auto sel = model_select(trace, window);
        out.write_text("fit.json", fit_report_json(sel, DecayModel::power_law, sys, bath, cat.separation));
        slope_err = relative_error(sel.power_law.alpha_fit, alpha_th);
    } catch (const std::invalid_argument& e) {
        m.warnings.push_back(std::string("full-solver visibility fit failed: ") + e.what());
    }
    m.checks.push_back(make_check("full_solver_alpha_rel_err", slope_err, full_solver_tolerance,
                                  Comparison::at_most, in_regime));

    // kinetic and potential terms off: the solver must reproduce exact dephasing
    EvolveConfig masked = ec;
    masked.terms.kinetic = false;
    masked.terms.potential = false;
    masked.record_every = std::numeric_limits<std::size_t>::max();
    masked.snapshot_every = std::numeric_limits<std::size_t>::max();
    const auto last = evolve_full(rho0, sys, bath, coeffs, masked).back();
    const auto exact = evolve_dephasing(rho0, sys, bath, last.time);
    const double masked_diff = (last.grid->values() - exact.values()).cwiseAbs().maxCoeff();
    m.checks.push_back(make_check("masked_vs_dephasing_max_norm", masked_diff, masked_tolerance));
    m.checks.push_back(make_check("trace_drift", trace_drift, trace_tolerance));
    m.checks.push_back(make_check("hermiticity_residual", herm_max, hermiticity_tolerance));
}

}  // namespace

Check make_check(std::string name, double value, double tolerance, Comparison comparison, bool acceptance) {
    Check c{std::move(name), value, tolerance, comparison, acceptance, false};
    c.pass = comparison == Comparison::at_most ? value <= tolerance : value >= tolerance;
    return c;
}

bool Manifest::ok() const {
    return std::none_of(checks.begin(), checks.end(), [](const Check& c) { return c.acceptance && !c.pass; });
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string() + " for hashing");
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 initialisation failed");
    }
    std::vector<char> buffer(1 << 16);
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        if (in.gcount() > 0) {
            EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

OutputSet::OutputSet(fs::path root) : root_(std::move(root)) {}

fs::path OutputSet::prepare(const std::string& relative) {
    const fs::path full = root_ / relative;
    fs::create_directories(full.parent_path());
    if (std::find(written_.begin(), written_.end(), relative) == written_.end()) {
        written_.push_back(relative);
    }
    return full;
}

void OutputSet::write_text(const std::string& relative, const std::string& text) {
    std::ofstream out(prepare(relative), std::ios::binary);
    out << text;
    if (!out) {
        throw std::runtime_error("failed to write " + (root_ / relative).string());
    }
}

void OutputSet::write_snapshot(const std::string& relative, const DensityGrid& rho) {
    std::ofstream out(prepare(relative), std::ios::binary);
    qbm::write_snapshot(out, rho);
}

void OutputSet::adopt(const OutputSet& other) {
    for (const auto& rel : other.written_) {
        if (std::find(written_.begin(), written_.end(), rel) == written_.end()) {
            written_.push_back(rel);
        }
    }
}

std::vector<FileRecord> OutputSet::records() const {
    std::vector<FileRecord> out;
    for (const auto& rel : written_) {
        out.push_back({rel, sha256_file(root_ / rel)});
    }
    std::sort(out.begin(), out.end(), [](const FileRecord& a, const FileRecord& b) { return a.path < b.path; });
    return out;
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) {
        throw std::invalid_argument("csv: header and column counts differ");
    }
    std::string text;
    for (std::size_t c = 0; c < header.size(); ++c) {
        text += (c ? "," : "") + header[c];
    }
    text += '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) {
                text += ',';
            }
            text += fmt::format("{}", columns[c].at(r));
        }
        text += '\n';
    }
    return text;
}

std::string fit_report_json(const ModelSelection& sel, DecayModel reported, const SystemParams& sys,
                            const BathParams& bath, double dx) {
    json j;
    j["model"] = to_string(sel.model);
    const double alpha_th = alpha_theory(sys, bath, dx);
    if (reported == DecayModel::exponential) {
        j["rate"] = sel.exponential.rate;
        j["r_squared"] = sel.exponential.r_squared;
        j["window"] = {sel.exponential.window.lo, sel.exponential.window.hi};
        j["alpha_theory"] = alpha_th;
        double rel = std::numeric_limits<double>::quiet_NaN();
        if (!bath.zero_temperature()) {
            const double rate_th = 2.0 * sys.mass * bath.gamma * bath.kT * dx * dx / (sys.hbar * sys.hbar);
            rel = relative_error(sel.exponential.rate, rate_th);
        }
        j["rel_err"] = number_or_null(rel);
    } else {
        j["alpha_fit"] = sel.power_law.alpha_fit;
        j["r_squared"] = sel.power_law.r_squared;
        j["window"] = {sel.power_law.window.lo, sel.power_law.window.hi};
        j["alpha_theory"] = alpha_th;
        j["rel_err"] = number_or_null(alpha_th > 0.0 ? relative_error(sel.power_law.alpha_fit, alpha_th)
                                                      : std::numeric_limits<double>::quiet_NaN());
    }
    j["delta_r_squared"] = sel.delta_r_squared;
    j["n_points"] = sel.power_law.n_points;
    return j.dump(2) + "\n";
}

std::string manifest_json(const Manifest& m) {
    json j;
    j["version"] = m.version;
    j["config_echo"] = json::parse(m.config_echo);
    j["files"] = json::array();
    for (const auto& f : m.files) {
        j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}});
    }
    j["checks"] = json::array();
    for (const auto& c : m.checks) {
        j["checks"].push_back({{"name", c.name},
                               {"value", number_or_null(c.value)},
                               {"tolerance", c.tolerance},
                               {"comparison", c.comparison == Comparison::at_most ? "<=" : ">="},
                               {"acceptance", c.acceptance},
                               {"pass", c.pass}});
    }
    j["warnings"] = m.warnings;
    j["defaults_applied"] = m.defaults_applied;
    return j.dump(2) + "\n";
}

Manifest run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    Manifest m;
    m.config_echo = dump_config(cfg);
    m.defaults_applied = cfg.defaults_applied;
    OutputSet out(cfg.output_dir);
    fs::create_directories(out.root());
    switch (cfg.scenario) {
    case ScenarioKind::zero_temperature: run_zero_temperature(cfg, out, m); break;
    case ScenarioKind::high_temperature: run_high_temperature(cfg, out, m); break;
    case ScenarioKind::separation_sweep: run_separation_sweep(cfg, out, m); break;
    case ScenarioKind::full_vs_dephasing: run_full_vs_dephasing(cfg, out, m); break;
    }
    m.files = out.records();
    std::ofstream(out.root() / "manifest.json", std::ios::binary) << manifest_json(m);
    return m;
}

}  // namespace qbm
