#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ebsc/model.hpp"
#include "ebsc/policy.hpp"

namespace ebsc {

struct GibbsConfig {
    HamiltonianDerivativeSpec spec;
    ControlGrid grid{-10.0, 10.0, 2001};
    double damping = 0.5;
    double tol = 1e-10;
    int max_iter = 500;
};

struct VerifyConfig {
    double delta = 0.1;                                  // duality mean shift
    std::vector<double> sigmas{0.4, 0.2, 0.1};           // degeneration ladder
    std::vector<int> path_counts{100, 1000, 10000, 100000};  // LLN sweep
    int lln_seeds = 20;
    std::vector<double> epsilons{0.1, 0.05, 0.025};
    int mean_shifts = 20;  // optimality perturbations (plus 2 covariance scalings)
    int stationarity_paths = 10;
};

// Parsed experiment description; `model` is already validated.
struct ExperimentConfig {
    ValidatedModel model;
    int n_paths = 10000;
    std::uint64_t seed = 42;
    bool seed_from_env = false;
    unsigned threads = 0;
    std::filesystem::path output_dir = "out";
    std::optional<GibbsConfig> gibbs;
    VerifyConfig verify;
    std::string config_hash;  // hash of the raw config bytes
};

// Loads and validates a config file. Throws ConfigError with a located
// message on malformed JSON or schema violations; model invariant failures
// propagate as NumericalError.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

}  // namespace ebsc
