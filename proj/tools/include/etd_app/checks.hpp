#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "etd_app/config.hpp"

namespace etd::app {

// One invariant: pass iff measured <= tolerance (or the comparison noted
// in `relation`).
struct Check {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string relation = "<=";
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;

    bool pass() const;
    void add(std::string name, double measured, double tolerance);
    void add_range(std::string name, double measured, double lo, double hi);
    nlohmann::json to_json() const;
};

// Gamma = Gamma_P + Gamma_S, reciprocity and the finite-difference elastic
// Helmholtz residual at random points; Hankel Wronskian.
SuiteReport suite_kernels(const ExperimentConfig& c, int points = 100);

// Helmholtz-Kirchhoff same-mode and cross-mode integrals on the configured
// boundary, plus the plane-wave direction sum.
SuiteReport suite_hk(const ExperimentConfig& c);

// Symmetries and action of the isotropic EMT.
SuiteReport suite_emt(const ExperimentConfig& c);

// Measurement-noise generator moments and the speckle covariance of the
// modal backpropagation at 5 point pairs.
SuiteReport suite_noise(const ExperimentConfig& c, int trials, int threads);

SuiteReport run_suite(const std::string& name, const ExperimentConfig& c, int trials, int threads);

}  // namespace etd::app
