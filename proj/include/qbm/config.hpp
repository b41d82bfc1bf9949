// config.hpp — scenario configuration: JSON ingestion, defaults and round-trip emission

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qbm/evolution.hpp"
#include "qbm/params.hpp"

namespace qbm {

enum class ScenarioKind { zero_temperature, high_temperature, separation_sweep, full_vs_dephasing };

std::string to_string(ScenarioKind k);
ScenarioKind scenario_from_string(const std::string& name);

// Grid and stepping for the full solver. Zero extent or dt means "derive from the cat state".
struct EvolveSettings {
    std::size_t n{256};
    double extent{0.0};
    double dt{0.0};
    double t_end{0.4};
    std::size_t record_every{50};
    std::size_t snapshot_every{0};

    bool operator==(const EvolveSettings&) const = default;
};

struct FitSettings {
    double t_lo{50.0};
    double t_hi{2000.0};
    std::size_t points{64};

    bool operator==(const FitSettings&) const = default;
};

struct SweepSettings {
    std::vector<double> separations{1.0, 2.0, 4.0};

    bool operator==(const SweepSettings&) const = default;
};

struct ScenarioConfig {
    ScenarioKind scenario{ScenarioKind::zero_temperature};
    SystemParams system;
    BathParams bath;
    CatStateSpec cat;
    EvolveSettings evolve;
    FitSettings fit;
    SweepSettings sweep;
    std::string output_dir{"qbm_out"};
    std::int64_t seed{0};

    // Blocks absent from the source file, filled from scenario defaults. Not serialised.
    std::vector<std::string> defaults_applied;

    void validate() const;
    bool operator==(const ScenarioConfig& o) const;
};

// Fully populated defaults for a scenario.
ScenarioConfig default_config(ScenarioKind kind);

// Parses JSON text. Unknown keys anywhere are rejected with their dotted path; missing
// blocks take the scenario defaults and are listed in defaults_applied.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Canonical JSON (two-space indent, fixed key order, trailing newline).
std::string dump_config(const ScenarioConfig& cfg);

}  // namespace qbm
