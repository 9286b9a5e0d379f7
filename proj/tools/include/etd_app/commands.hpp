#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "etd_app/checks.hpp"
#include "etd_app/config.hpp"

namespace etd::app {

// Data directory does not belong to the configuration in use.
struct ManifestMismatch : std::runtime_error {
    ManifestMismatch(const std::string& msg, std::vector<std::string> d)
        : std::runtime_error(msg), diff(std::move(d)) {}
    std::vector<std::string> diff;
};

const char* version();

// Command-line overrides; an override changes the configuration (and so its
// hash) exactly as editing the file would.
struct Overrides {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
};
ExperimentConfig apply_overrides(ExperimentConfig c, const Overrides& o);

// Filtered boundary data for every probe (plus measurement noise when
// noise.sigma_noise > 0): <out>/data/probe_NNN.csv, then <out>/manifest.json.
nlohmann::json cmd_simulate(const ExperimentConfig& c, int threads);

// Reads a simulate output directory, refuses unless its manifest hash equals
// config_hash(c), and writes itd, iwf, predicted_peak and coupling images,
// then <out>/summary.json.
nlohmann::json cmd_image(const ExperimentConfig& c, const std::string& data_dir, int threads);

// Monte Carlo noise statistics; writes profile CSVs then <out>/mc_noise.json.
nlohmann::json cmd_mc_noise(const ExperimentConfig& c, int threads);

// Runs a validation suite; writes <out>/validate_<suite>.json when write is set.
SuiteReport cmd_validate(const std::string& suite, const ExperimentConfig& c, int threads, bool write);

// Argument handling and dispatch; returns the process exit code.
// 0 ok, 1 failed statistic or invariant, 2 usage or configuration error,
// 3 I/O error, 4 manifest mismatch.
int run_cli(int argc, char** argv);

}  // namespace etd::app
