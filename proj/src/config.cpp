// config.cpp

#include "qbm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <json.hpp>

namespace qbm {

namespace {

using json = nlohmann::ordered_json;

// Reads the keys of one JSON object, remembering which were consumed so leftovers
// can be reported by name.
class BlockReader {
public:
    BlockReader(const json& obj, std::string path, std::vector<std::string>& defaulted)
        : obj_(obj), path_(std::move(path)), defaulted_(defaulted) {
        if (!obj_.is_object()) {
            throw std::invalid_argument("config: '" + path_ + "' must be an object");
        }
    }

    template <class T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end()) {
            defaulted_.push_back(qualified(key));
            return;
        }
        if constexpr (std::is_unsigned_v<T>) {
            if (!it->is_number_unsigned()) {
                throw std::invalid_argument("config: '" + qualified(key) + "' must be a nonnegative integer");
            }
        }
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw std::invalid_argument("config: '" + qualified(key) + "' has the wrong type");
        }
    }

    void mark(const char* key) { seen_.insert(key); }

    void reject_unknown() const {
        for (const auto& item : obj_.items()) {
            if (!seen_.count(item.key())) {
                throw std::invalid_argument("config: unknown key '" + qualified(item.key()) + "'");
            }
        }
    }

private:
    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& obj_;
    std::string path_;
    std::vector<std::string>& defaulted_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw std::invalid_argument("config: " + message);
    }
}

// Fit windows that follow the physical parameters when the fit block is absent.
FitSettings derived_fit(const ScenarioConfig& cfg) {
    FitSettings fit;
    switch (cfg.scenario) {
    case ScenarioKind::high_temperature: {
        if (cfg.bath.zero_temperature()) {
            break;  // rejected later by validate()
        }
        const double tau_d = decoherence_time(cfg.system, cfg.bath, cfg.cat.separation);
        fit.t_lo = 5.0 / cfg.bath.cutoff;
        fit.t_hi = 3.0 * tau_d;
        break;
    }
    case ScenarioKind::full_vs_dephasing: {
        const TimeWindow w = default_fit_window(derive_timescales(cfg.system, cfg.bath));
        fit.t_lo = w.lo;
        fit.t_hi = std::min(w.hi, cfg.evolve.t_end);
        break;
    }
    default:
        break;
    }
    return fit;
}

}  // namespace

std::string to_string(ScenarioKind k) {
    switch (k) {
    case ScenarioKind::zero_temperature: return "zero_temperature";
    case ScenarioKind::high_temperature: return "high_temperature";
    case ScenarioKind::separation_sweep: return "separation_sweep";
    case ScenarioKind::full_vs_dephasing: return "full_vs_dephasing";
    }
    return "zero_temperature";
}

ScenarioKind scenario_from_string(const std::string& name) {
    for (auto k : {ScenarioKind::zero_temperature, ScenarioKind::high_temperature,
                   ScenarioKind::separation_sweep, ScenarioKind::full_vs_dephasing}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown scenario '" + name + "'");
}

void ScenarioConfig::validate() const {
    system.validate();
    bath.validate();
    cat.validate();
    require(evolve.n >= min_grid_points, "evolve.n must be at least " + std::to_string(min_grid_points));
    require(std::isfinite(evolve.extent) && evolve.extent >= 0.0, "evolve.extent must be nonnegative (0 = automatic)");
    require(std::isfinite(evolve.dt) && evolve.dt >= 0.0, "evolve.dt must be nonnegative (0 = automatic)");
    require(std::isfinite(evolve.t_end) && evolve.t_end > 0.0, "evolve.t_end must be positive");
    require(evolve.record_every >= 1, "evolve.record_every must be at least 1");
    require(fit.t_lo > 0.0 && fit.t_hi > fit.t_lo && std::isfinite(fit.t_hi), "fit window must satisfy 0 < t_lo < t_hi < inf");
    require(fit.points >= 8, "fit.points must be at least 8");
    require(!sweep.separations.empty(), "sweep.separations must not be empty");
    for (double d : sweep.separations) {
        require(std::isfinite(d) && d > 0.0, "sweep.separations must be positive");
    }
    require(!output_dir.empty(), "output_dir must not be empty");
    if (scenario == ScenarioKind::high_temperature) {
        require(!bath.zero_temperature(), "high_temperature scenario needs params.kT > 0");
    }
    if (scenario == ScenarioKind::zero_temperature || scenario == ScenarioKind::separation_sweep) {
        require(cat.separation > 0.0 || scenario == ScenarioKind::separation_sweep,
                "cat.separation must be positive");
    }
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
    return scenario == o.scenario && system.mass == o.system.mass &&
           system.frequency == o.system.frequency && system.hbar == o.system.hbar &&
           bath.gamma == o.bath.gamma && bath.cutoff == o.bath.cutoff && bath.kT == o.bath.kT &&
           cat.separation == o.cat.separation && cat.width == o.cat.width &&
           cat.center == o.cat.center && evolve == o.evolve && fit == o.fit && sweep == o.sweep &&
           output_dir == o.output_dir && seed == o.seed;
}

ScenarioConfig default_config(ScenarioKind kind) {
    ScenarioConfig cfg;
    cfg.scenario = kind;
    cfg.system = {1.0, 1e-4, 1.0};
    cfg.bath = {0.05, 200.0, 0.0};
    cfg.cat = {2.0, 0.25, 0.0};
    switch (kind) {
    case ScenarioKind::zero_temperature:
    case ScenarioKind::separation_sweep:
        break;
    case ScenarioKind::high_temperature:
        cfg.bath = {0.1, 200.0, 50.0};
        break;
    case ScenarioKind::full_vs_dephasing:
        // lambda_q = 0.2 so d = 2 is ten coherence lengths; Omega = 0 keeps Theta_D closed form
        cfg.system.frequency = 0.0;
        cfg.bath = {25.0, 2500.0, 0.0};
        break;
    }
    cfg.fit = derived_fit(cfg);
    return cfg;
}

ScenarioConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
    }
    std::vector<std::string> defaulted;
    BlockReader top(root, "", defaulted);

    std::string scenario_name = "zero_temperature";
    top.read("scenario", scenario_name);
    ScenarioConfig cfg = default_config(scenario_from_string(scenario_name));
    top.read("output_dir", cfg.output_dir);
    top.read("seed", cfg.seed);

    auto block = [&](const char* name, auto&& body) {
        const auto it = root.find(name);
        if (it == root.end()) {
            defaulted.emplace_back(name);
            return false;
        }
        BlockReader reader(*it, name, defaulted);
        body(reader);
        reader.reject_unknown();
        return true;
    };

    block("params", [&](BlockReader& r) {
        r.read("mass", cfg.system.mass);
        r.read("frequency", cfg.system.frequency);
        r.read("hbar", cfg.system.hbar);
        r.read("gamma", cfg.bath.gamma);
        r.read("cutoff", cfg.bath.cutoff);
        r.read("kT", cfg.bath.kT);
    });
    block("cat", [&](BlockReader& r) {
        r.read("separation", cfg.cat.separation);
        r.read("width", cfg.cat.width);
        r.read("center", cfg.cat.center);
    });
    block("evolve", [&](BlockReader& r) {
        r.read("n", cfg.evolve.n);
        r.read("extent", cfg.evolve.extent);
        r.read("dt", cfg.evolve.dt);
        r.read("t_end", cfg.evolve.t_end);
        r.read("record_every", cfg.evolve.record_every);
        r.read("snapshot_every", cfg.evolve.snapshot_every);
    });
    cfg.system.validate();
    cfg.bath.validate();
    cfg.cat.validate();
    // the fit window defaults track the (possibly overridden) physics
    cfg.fit = derived_fit(cfg);
    block("fit", [&](BlockReader& r) {
        r.read("t_lo", cfg.fit.t_lo);
        r.read("t_hi", cfg.fit.t_hi);
        r.read("points", cfg.fit.points);
    });
    block("sweep", [&](BlockReader& r) { r.read("separations", cfg.sweep.separations); });
    for (const char* name : {"params", "cat", "evolve", "fit", "sweep"}) {
        top.mark(name);
    }
    top.reject_unknown();
    cfg.defaults_applied = std::move(defaulted);
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string dump_config(const ScenarioConfig& cfg) {
    json root;
    root["scenario"] = to_string(cfg.scenario);
    root["output_dir"] = cfg.output_dir;
    root["seed"] = cfg.seed;
    root["params"] = {{"mass", cfg.system.mass},   {"frequency", cfg.system.frequency},
                      {"hbar", cfg.system.hbar},   {"gamma", cfg.bath.gamma},
                      {"cutoff", cfg.bath.cutoff}, {"kT", cfg.bath.kT}};
    root["cat"] = {{"separation", cfg.cat.separation}, {"width", cfg.cat.width}, {"center", cfg.cat.center}};
    root["evolve"] = {{"n", cfg.evolve.n},
                      {"extent", cfg.evolve.extent},
                      {"dt", cfg.evolve.dt},
                      {"t_end", cfg.evolve.t_end},
                      {"record_every", cfg.evolve.record_every},
                      {"snapshot_every", cfg.evolve.snapshot_every}};
    root["fit"] = {{"t_lo", cfg.fit.t_lo}, {"t_hi", cfg.fit.t_hi}, {"points", cfg.fit.points}};
    root["sweep"] = {{"separations", cfg.sweep.separations}};
    return root.dump(2) + "\n";
}

}  // namespace qbm
