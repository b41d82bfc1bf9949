// scenario.hpp — named experiments, output bookkeeping and the run manifest

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qbm/analysis.hpp"
#include "qbm/config.hpp"

namespace qbm {

inline constexpr const char* manifest_version = "1";

enum class Comparison { at_most, at_least };

struct Check {
    std::string name;
    double value{};
    double tolerance{};
    Comparison comparison{Comparison::at_most};
    bool acceptance{true};  // informational checks never affect the exit status
    bool pass{};
};

Check make_check(std::string name, double value, double tolerance,
                 Comparison comparison = Comparison::at_most, bool acceptance = true);

struct FileRecord {
    std::string path;  // relative to the output directory, '/' separated
    std::string sha256;
};

struct Manifest {
    std::string version{manifest_version};
    std::string config_echo;  // canonical config JSON
    std::vector<FileRecord> files;
    std::vector<Check> checks;
    std::vector<std::string> warnings;
    std::vector<std::string> defaults_applied;

    // True unless some acceptance check failed.
    bool ok() const;
};

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

// Collects the files written under one output directory.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }

    // Writes text to root/relative, creating parent directories; records the file.
    void write_text(const std::string& relative, const std::string& text);
    void write_snapshot(const std::string& relative, const DensityGrid& rho);

    // Takes over the files recorded by another set sharing this root.
    void adopt(const OutputSet& other);

    // Records sorted by path, each with its content hash.
    std::vector<FileRecord> records() const;

private:
    std::filesystem::path prepare(const std::string& relative);

    std::filesystem::path root_;
    std::vector<std::string> written_;
};

// CSV text; numbers use the shortest representation that round-trips.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns);

// {model, alpha_fit | rate, r_squared, window, alpha_theory, rel_err}. rel_err compares
// alpha_fit with alpha_theory, or the rate with 2 M gamma kT dx^2 / hbar^2 (null at T = 0).
std::string fit_report_json(const ModelSelection& sel, DecayModel reported, const SystemParams& sys,
                            const BathParams& bath, double dx);

std::string manifest_json(const Manifest& m);

// Runs the configured scenario, writes its files and manifest.json into cfg.output_dir
// and returns the manifest.
Manifest run_scenario(const ScenarioConfig& cfg);

}  // namespace qbm
