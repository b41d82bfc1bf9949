// qbm_cli.cpp — command-line front end: kernels, coefficients, evolution, fits and scenarios

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "qbm/analysis.hpp"
#include "qbm/coefficients.hpp"
#include "qbm/config.hpp"
#include "qbm/kernels.hpp"
#include "qbm/scenario.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace qbm;

constexpr int exit_check_failed = 1;
constexpr int exit_error = 2;

struct Globals {
    std::string config_path;
    std::string out_dir{"."};
    bool quiet{false};
};

// Flags that override the loaded (or default) configuration only when given.
class Overrides {
public:
    template <class T, class Setter>
    void bind(CLI::App* app, const std::string& flag, const std::string& help, Setter set) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app->add_option(flag, *value, help);
        items_.push_back({opt, [value, set](ScenarioConfig& c) { set(c, *value); }});
    }

    void apply(ScenarioConfig& cfg) const {
        for (const auto& [opt, set] : items_) {
            if (opt->count() > 0) {
                set(cfg);
            }
        }
    }

private:
    std::vector<std::pair<CLI::Option*, std::function<void(ScenarioConfig&)>>> items_;
};

void add_physics(CLI::App* app, Overrides& o) {
    o.bind<double>(app, "--mass", "particle mass M", [](auto& c, double v) { c.system.mass = v; });
    o.bind<double>(app, "--frequency", "oscillator frequency Omega", [](auto& c, double v) { c.system.frequency = v; });
    o.bind<double>(app, "--hbar", "Planck constant", [](auto& c, double v) { c.system.hbar = v; });
    o.bind<double>(app, "--gamma", "relaxation rate gamma", [](auto& c, double v) { c.bath.gamma = v; });
    o.bind<double>(app, "--cutoff", "bath cutoff Lambda", [](auto& c, double v) { c.bath.cutoff = v; });
    o.bind<double>(app, "--kT", "bath temperature k_B T (0 = absolute zero)", [](auto& c, double v) { c.bath.kT = v; });
}

void add_cat(CLI::App* app, Overrides& o) {
    o.bind<double>(app, "--separation", "packet separation d", [](auto& c, double v) { c.cat.separation = v; });
    o.bind<double>(app, "--width", "packet width sigma", [](auto& c, double v) { c.cat.width = v; });
    o.bind<double>(app, "--center", "cat centre", [](auto& c, double v) { c.cat.center = v; });
}

void add_grid(CLI::App* app, Overrides& o) {
    o.bind<std::size_t>(app, "--n", "grid points per axis", [](auto& c, std::size_t v) { c.evolve.n = v; });
    o.bind<double>(app, "--extent", "grid extent (0 = automatic)", [](auto& c, double v) { c.evolve.extent = v; });
    o.bind<double>(app, "--dt", "time step (0 = 0.1 M dx^2 / hbar)", [](auto& c, double v) { c.evolve.dt = v; });
    o.bind<double>(app, "--t-end", "final time", [](auto& c, double v) { c.evolve.t_end = v; });
    o.bind<std::size_t>(app, "--record-every", "diagnostics every k steps", [](auto& c, std::size_t v) { c.evolve.record_every = v; });
    o.bind<std::size_t>(app, "--snapshot-every", "binary grid every k steps (0 = never)", [](auto& c, std::size_t v) { c.evolve.snapshot_every = v; });
}

ScenarioConfig base_config(const Globals& g, ScenarioKind fallback) {
    return g.config_path.empty() ? default_config(fallback) : load_config(g.config_path);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw std::runtime_error("failed to write " + path.string());
    }
}

void say(const Globals& g, const std::string& text) {
    if (!g.quiet) {
        std::cout << text << '\n';
    }
}

json params_json(const ScenarioConfig& c) {
    return {{"mass", c.system.mass}, {"frequency", c.system.frequency}, {"hbar", c.system.hbar},
            {"gamma", c.bath.gamma}, {"cutoff", c.bath.cutoff},         {"kT", c.bath.kT}};
}

json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

// ---- kernel ---------------------------------------------------------------

struct KernelArgs {
    double s_min{0.0};
    double s_max{0.0};
    std::size_t points{100};
    std::string method{"auto"};
};

int run_kernel(const Globals& g, const Overrides& o, const KernelArgs& a) {
    auto cfg = base_config(g, ScenarioKind::zero_temperature);
    o.apply(cfg);
    cfg.system.validate();
    cfg.bath.validate();
    const double s_min = a.s_min > 0.0 ? a.s_min : 1e-3 / cfg.bath.cutoff;
    const double s_max = a.s_max > 0.0 ? a.s_max : 1e3 / cfg.bath.cutoff;
    KernelMethod method = KernelMethod::quadrature;
    if (a.method == "auto") {
        method = cfg.bath.zero_temperature() ? KernelMethod::closed_zero_T : KernelMethod::quadrature;
    } else {
        method = kernel_method_from_string(a.method);
    }
    const auto grid = log_spaced(s_min, s_max, a.points);
    const auto trace = kernel_trace(cfg.system, cfg.bath, grid, method);

    // the independent route: quadrature checks the closed forms and the zero-T closed form
    // checks quadrature; quadrature at T > 0 has no exact counterpart
    double max_rel = std::numeric_limits<double>::quiet_NaN();
    if (method != KernelMethod::quadrature || cfg.bath.zero_temperature()) {
        const auto other = method == KernelMethod::quadrature ? KernelMethod::closed_zero_T : KernelMethod::quadrature;
        const auto ref = kernel_trace(cfg.system, cfg.bath, grid, other);
        max_rel = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            max_rel = std::max(max_rel, std::abs(trace.values[i] - ref.values[i]) / std::abs(ref.values[i]));
        }
    }

    std::string text = "s,nu,method\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        text += fmt::format("{},{},{}\n", grid[i], trace.values[i], to_string(method));
    }
    const std::filesystem::path out(g.out_dir);
    write_file(out / "kernel.csv", text);
    json side;
    side["params"] = params_json(cfg);
    side["tolerance"] = {{"abs", default_tolerance.abs}, {"rel", default_tolerance.rel}};
    side["max_rel_err_vs_oracle"] = finite_or_null(max_rel);
    write_file(out / "kernel.json", side.dump(2) + "\n");
    say(g, fmt::format("kernel: {} points, method {}, max rel err vs oracle {}", grid.size(),
                       to_string(method), max_rel));
    return 0;
}

// ---- coeffs ---------------------------------------------------------------

struct RangeArgs {
    double t_min{0.05};
    double t_max{2000.0};
    std::size_t points{64};
};

int run_coeffs(const Globals& g, const Overrides& o, const RangeArgs& a) {
    auto cfg = base_config(g, ScenarioKind::zero_temperature);
    o.apply(cfg);
    const auto coeffs = weak_coupling_coefficients(cfg.system, cfg.bath);
    const auto times = log_spaced(a.t_min, a.t_max, a.points);
    const auto theta = exponent_trace(cfg.system, cfg.bath, times);
    std::string text = "t,D,theta,method\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        text += fmt::format("{},{},{},{}\n", times[i], coeffs.diffusion(times[i]), theta.theta[i],
                            to_string(theta.method));
    }
    write_file(std::filesystem::path(g.out_dir) / "coeffs.csv", text);
    say(g, fmt::format("coeffs: {} times, method {}", times.size(), to_string(theta.method)));
    return 0;
}

// ---- alpha ----------------------------------------------------------------

int run_alpha(const Globals& g, const Overrides& o) {
    auto cfg = base_config(g, ScenarioKind::zero_temperature);
    o.apply(cfg);
    const double alpha = alpha_theory(cfg.system, cfg.bath, cfg.cat.separation);
    const auto window = default_fit_window(derive_timescales(cfg.system, cfg.bath));
    json j;
    j["alpha"] = alpha;
    j["lambda_q"] = coherence_length(cfg.system, cfg.bath);
    j["regime_window_suggestion"] = {window.lo, finite_or_null(window.hi)};
    const std::string text = j.dump(2) + "\n";
    write_file(std::filesystem::path(g.out_dir) / "alpha.json", text);
    if (!g.quiet) {
        std::cout << text;
    }
    return 0;
}

// ---- evolve ---------------------------------------------------------------

int run_evolve(const Globals& g, const Overrides& o) {
    auto cfg = base_config(g, ScenarioKind::full_vs_dephasing);
    o.apply(cfg);
    cfg.validate();
    const auto& cat = cfg.cat;
    double extent = cfg.evolve.extent;
    if (extent == 0.0) {
        extent = automatic_extent(cat, cfg.evolve.n);
    }
    const auto rho0 = init_cat_state(cat, cfg.evolve.n, extent);
    EvolveConfig ec;
    ec.dt = cfg.evolve.dt > 0.0 ? cfg.evolve.dt : default_time_step(cfg.system, rho0);
    ec.t_end = cfg.evolve.t_end;
    ec.record_every = cfg.evolve.record_every;
    ec.snapshot_every = cfg.evolve.snapshot_every;
    const auto coeffs = weak_coupling_coefficients(cfg.system, cfg.bath);
    const auto snaps = evolve_full(rho0, cfg.system, cfg.bath, coeffs, ec,
                                   [&](const DensityGrid& r) { return fringe_visibility(r, cat); });
    OutputSet out(g.out_dir);
    std::vector<double> t, vis, tr, herm, pur;
    for (const auto& s : snaps) {
        t.push_back(s.time);
        vis.push_back(s.observable);
        tr.push_back(s.trace);
        herm.push_back(s.herm_residual);
        pur.push_back(s.purity);
        if (s.grid) {
            out.write_snapshot(fmt::format("snapshots/step_{:07}.bin", s.step), *s.grid);
        }
    }
    out.write_text("evolve.csv", csv({"t", "visibility", "trace", "herm_residual", "purity"}, {t, vis, tr, herm, pur}));
    say(g, fmt::format("evolve: {} steps on a {}x{} grid (dx = {}, dt = {}); final visibility {}",
                       snaps.back().step, rho0.size(), rho0.size(), rho0.spacing(), ec.dt, vis.back()));
    return 0;
}

// ---- fit ------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::string column{"auto"};
    std::string model{"auto"};
    double t_lo{0.0};
    double t_hi{0.0};
};

// Reads (t, column) pairs from a trace CSV, skipping t <= 0.
CoherenceTrace read_trace(const std::string& path, std::string column) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open trace " + path);
    }
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    for (std::stringstream ss(line); std::getline(ss, line, ',');) {
        header.push_back(line);
    }
    auto index_of = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? std::string::npos : static_cast<std::size_t>(it - header.begin());
    };
    if (column == "auto") {
        for (const char* candidate : {"log_coherence", "coherence", "visibility"}) {
            if (index_of(candidate) != std::string::npos) {
                column = candidate;
                break;
            }
        }
    }
    const std::size_t ti = index_of("t");
    const std::size_t ci = index_of(column);
    if (ti == std::string::npos || ci == std::string::npos) {
        throw std::invalid_argument("trace " + path + " lacks a 't' column or the column '" + column + "'");
    }
    std::vector<double> t, v;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        for (std::stringstream ss(line); std::getline(ss, cell, ',');) {
            cells.push_back(cell);
        }
        if (cells.size() != header.size()) {
            throw std::invalid_argument("malformed trace row: " + line);
        }
        const double time = std::stod(cells[ti]);
        if (time > 0.0) {
            t.push_back(time);
            v.push_back(std::stod(cells[ci]));
        }
    }
    const auto kind = column == "visibility" ? MeasureKind::fringe_visibility : MeasureKind::offdiag_factor;
    return column == "log_coherence" ? CoherenceTrace::from_logs(t, v, kind)
                                     : CoherenceTrace::from_values(t, v, kind);
}

int run_fit(const Globals& g, const Overrides& o, const FitArgs& a) {
    auto cfg = base_config(g, ScenarioKind::zero_temperature);
    o.apply(cfg);
    const auto trace = read_trace(a.input, a.column);
    if (trace.size() == 0) {
        throw std::invalid_argument("trace " + a.input + " holds no samples with t > 0");
    }
    TimeWindow window{a.t_lo > 0.0 ? a.t_lo : trace.times.front(), a.t_hi > 0.0 ? a.t_hi : trace.times.back()};
    const auto sel = model_select(trace, window);
    DecayModel reported = sel.model == DecayModel::exponential ? DecayModel::exponential : DecayModel::power_law;
    if (a.model == "power_law") {
        reported = DecayModel::power_law;
    } else if (a.model == "exponential") {
        reported = DecayModel::exponential;
    } else if (a.model != "auto") {
        throw std::invalid_argument("unknown model '" + a.model + "'");
    }
    const std::string text = fit_report_json(sel, reported, cfg.system, cfg.bath, cfg.cat.separation);
    write_file(std::filesystem::path(g.out_dir) / "fit.json", text);
    if (!g.quiet) {
        std::cout << text;
    }
    return 0;
}

// ---- scenario -------------------------------------------------------------

int run_named_scenario(const Globals& g, const std::string& name, bool out_given) {
    ScenarioConfig cfg;
    if (!g.config_path.empty()) {
        cfg = load_config(g.config_path);
        if (!name.empty() && scenario_from_string(name) != cfg.scenario) {
            throw std::invalid_argument("scenario '" + name + "' conflicts with '" +
                                        to_string(cfg.scenario) + "' in " + g.config_path);
        }
    } else {
        cfg = default_config(scenario_from_string(name.empty() ? "zero_temperature" : name));
        cfg.defaults_applied = {"params", "cat", "evolve", "fit", "sweep"};
    }
    if (out_given) {
        cfg.output_dir = g.out_dir;
    }
    const auto manifest = run_scenario(cfg);
    if (!g.quiet) {
        std::cout << fmt::format("scenario {} -> {}\n", to_string(cfg.scenario), cfg.output_dir);
        for (const auto& c : manifest.checks) {
            std::cout << fmt::format("  [{}] {} = {:.6g} ({} {:.6g}){}\n", c.pass ? "PASS" : "FAIL", c.name,
                                     c.value, c.comparison == Comparison::at_most ? "<=" : ">=",
                                     c.tolerance, c.acceptance ? "" : " informational");
        }
        for (const auto& w : manifest.warnings) {
            std::cout << "  warning: " << w << '\n';
        }
    }
    return manifest.ok() ? 0 : exit_check_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Brownian motion decoherence lab"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "scenario configuration JSON")->check(CLI::ExistingFile);
    CLI::Option* out_opt = app.add_option("--out", g.out_dir, "output directory");
    app.add_flag("--quiet", g.quiet, "suppress console summaries");

    Overrides kernel_o, coeffs_o, alpha_o, evolve_o, fit_o;

    KernelArgs ka;
    auto* kernel = app.add_subcommand("kernel", "noise kernel nu(s) on a log grid");
    add_physics(kernel, kernel_o);
    kernel->add_option("--s-min", ka.s_min, "smallest s (default 1e-3 / Lambda)");
    kernel->add_option("--s-max", ka.s_max, "largest s (default 1e3 / Lambda)");
    kernel->add_option("--points", ka.points, "number of samples")->check(CLI::Range(2, 1000000));
    kernel->add_option("--method", ka.method, "auto, closed_zero_T, closed_high_T or quadrature");

    RangeArgs ca;
    auto* coeffs = app.add_subcommand("coeffs", "diffusion coefficient D(t) and exponent Theta_D(t)");
    add_physics(coeffs, coeffs_o);
    coeffs->add_option("--t-min", ca.t_min, "first time");
    coeffs->add_option("--t-max", ca.t_max, "last time");
    coeffs->add_option("--points", ca.points, "number of log-spaced times")->check(CLI::Range(2, 1000000));

    auto* alpha = app.add_subcommand("alpha", "zero-temperature power-law exponent");
    add_physics(alpha, alpha_o);
    add_cat(alpha, alpha_o);

    auto* evolve = app.add_subcommand("evolve", "full master-equation evolution of a cat state");
    add_physics(evolve, evolve_o);
    add_cat(evolve, evolve_o);
    add_grid(evolve, evolve_o);

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "fit a coherence trace CSV");
    add_physics(fit, fit_o);
    add_cat(fit, fit_o);
    fit->add_option("--input", fa.input, "trace CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--column", fa.column, "value column (auto picks log_coherence, coherence, visibility)");
    fit->add_option("--model", fa.model, "auto, power_law or exponential");
    fit->add_option("--t-lo", fa.t_lo, "window start (default first sample)");
    fit->add_option("--t-hi", fa.t_hi, "window end (default last sample)");

    std::string scenario_name;
    auto* scenario = app.add_subcommand("scenario", "run a named experiment and write a manifest");
    scenario->add_option("name", scenario_name,
                         "zero_temperature, high_temperature, separation_sweep or full_vs_dephasing");

    CLI11_PARSE(app, argc, argv);

    try {
        if (kernel->parsed()) return run_kernel(g, kernel_o, ka);
        if (coeffs->parsed()) return run_coeffs(g, coeffs_o, ca);
        if (alpha->parsed()) return run_alpha(g, alpha_o);
        if (evolve->parsed()) return run_evolve(g, evolve_o);
        if (fit->parsed()) return run_fit(g, fit_o, fa);
        if (scenario->parsed()) return run_named_scenario(g, scenario_name, out_opt->count() > 0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}
