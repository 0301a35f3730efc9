#pragma once

#include "galpha/params.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace galpha::cli {

inline const std::vector<std::string> kCommands = {"spectrum", "stability-map", "converge", "order-check", "solve"};

struct ProblemSpec {
    std::string type = "scalar";  // scalar | heat
    double lambda = 1.0;
    double u0 = 1.0;
    int elements = 32;
    double kappa = 1.0;
    std::string manufactured = "sine-decay";
    std::optional<int> max_forcing_order;
};

struct Sweep {
    double tau0 = 0.25;
    int halvings = 5;
};

struct PerturbGamma {
    int stage = 1;  // one-based
    double delta = 0.0;
};

struct RunConfig {
    std::string command;
    std::optional<int> k;
    std::vector<double> rho = {0.5};
    std::vector<int> ks;  // order-check

    // spectrum
    double theta_min = 1e-4;
    double theta_max = 1e8;
    int theta_points = 200;
    std::vector<double> theta;  // explicit grid, overrides min/max/points

    // stability-map
    std::array<double, 2> re_range = {0.0, 10.0};
    std::array<double, 2> im_range = {-10.0, 10.0};
    std::array<int, 2> resolution = {21, 21};

    // converge / solve
    ProblemSpec problem;
    std::optional<double> tau;
    std::optional<int> steps;
    std::optional<double> T;
    Sweep sweep;
    std::string reference = "semidiscrete";  // heat converge: semidiscrete | exact
    std::string precision = "double";        // double | long-double
    std::vector<int> dofs;                   // solve: selected dofs (zero-based), empty = all
    int every = 1;                           // solve: output every n-th step

    // order-check
    Sweep recurrence = {0.1, 6};
    double recurrence_lambda = 1.0;
    Sweep global = {0.25, 4};
    std::optional<PerturbGamma> perturb_gamma;

    std::string out;
    bool svg = false;

    /// Stage count implied by `k` and `rho`.
    int stages() const;
    /// Method parameters for k stages (rho broadcast when scalar).
    MethodParams<double> params(int k) const;
    MethodParams<double> params() const { return params(stages()); }
    double final_time() const;
};

/// Parses a JSON config; throws ConfigError on unknown keys, wrong types or invalid values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Checks the fields the command needs.
void validate(const RunConfig& cfg);

} // namespace galpha::cli
