#pragma once

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "etd/noise_stats.hpp"

namespace etd::app {

// Invalid configuration; the message starts with the offending field path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Isotropic EMT parameters; "none" means the zero tensor.
struct EMTConfig {
    std::string type = "none";  // none | iso
    double a = 1.0;
    double b = 1.0;
};

struct ExperimentConfig {
    int dim = 2;
    std::string length_unit = "m";

    struct {
        double lambda0 = 9.0;
        double mu0 = 1.0;
        double rho0 = 1.0;
        double omega = 2.0 * std::numbers::pi;
    } medium;

    struct {
        std::vector<double> za{0.4, -0.25};
        double delta = 0.01;
        double volume = 0.0;  // 0 selects the unit disk / ball
        double rho1 = 2.0;
        EMTConfig emt;
    } inclusion;

    struct {
        double rho1 = 2.0;
        double volume = 0.0;
        EMTConfig emt;
    } trial;

    struct {
        double radius = 10.0;
        int nodes = 512;   // 2D
        int ntheta = 24;   // 3D
        int nphi = 48;     // 3D
        double margin = 2.0;
    } boundary;

    struct {
        std::string mode = "S";
        int directions = 64;
    } probes;

    struct {
        std::vector<double> center{0.0, 0.0};
        double extent = 4.0;  // side length of the square / cube
        double spacing = 0.04;
    } search;

    struct {
        double sigma_noise = 0.0;
        struct {
            double sigma_gamma = 0.0;
            double corr_len = 0.5;
            double radius = 4.0;
            double h = 0.125;
        } medium;
    } noise;

    struct {
        int trials = 500;
        std::uint64_t seed = 20240101;
    } mc;

    struct {
        std::string dir = "out";
        std::vector<std::string> formats{"csv", "pgm"};
    } output;
};

// Strict parse: unknown keys, wrong types and violated invariants throw
// ConfigError; missing keys take their defaults.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// Every field, in a fixed order.
nlohmann::json to_json(const ExperimentConfig& c);

// Hash (16 hex digits) of all numerics-relevant fields; output.* excluded.
std::string config_hash(const ExperimentConfig& c);
nlohmann::json numerics_json(const ExperimentConfig& c);

// Dotted paths whose values differ between two JSON documents, formatted
// as "path: a -> b".
std::vector<std::string> json_diff(const nlohmann::json& a, const nlohmann::json& b);

void validate_config(const ExperimentConfig& c);
std::vector<std::string> config_warnings(const ExperimentConfig& c);

// Domain objects built from a validated configuration.
Medium make_medium(const ExperimentConfig& c);
Inclusion make_inclusion(const ExperimentConfig& c);
TrialInclusion make_trial(const ExperimentConfig& c);
BoundaryGrid make_boundary(const ExperimentConfig& c);
Mode probe_mode(const ExperimentConfig& c);
std::vector<PlaneWave> make_probe_set(const ExperimentConfig& c);
SearchGrid make_search(const ExperimentConfig& c);
int search_count(const ExperimentConfig& c);
GaussianFieldSpec make_field_spec(const ExperimentConfig& c);

}  // namespace etd::app
