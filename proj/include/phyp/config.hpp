#pragma once

#include "phyp/boundary.hpp"
#include "phyp/builtins.hpp"
#include "phyp/periodic_solver.hpp"
#include "phyp/system_model.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace phyp {

struct RunConfig
{
    std::string system = "linear_damped_scalar";
    std::map<std::string, double> params;

    double period = 1.0;
    double gain_left = 0.0;
    double gain_right = 0.0;
    double quadratic = 0.0;
    std::vector<Harmonic> forcing; // amplitudes before scaling by epsilon

    IterationConfig solver;
    bool rescale_time = false;

    std::string mode = "periodic";
    double epsilon = 1.0;
    std::vector<double> epsilons;
    double perturbation = 0.5;  // relative to the scaled forcing amplitude
    double t_end = 0.0;         // 0 means six transit times
    int records_per_transit = 8;
};

struct Problem
{
    SystemSpec spec;
    BoundarySpec bspec;
    double time_scale = 1.0; // c when the system was rescaled
};

/// Parses YAML (JSON is accepted as well); unknown keys raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Builtin system and boundary maps with forcing amplitudes scaled by epsilon.
/// Applies the time rescaling when `rescale_time` is set and mu_max > 1.
Problem build_problem(const RunConfig& cfg, double epsilon);

} // namespace phyp
