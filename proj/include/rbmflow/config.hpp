// Experiment configuration: defaults, validation, and a flat TOML loader.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "rbmflow/geometry.hpp"

namespace rbmflow {

struct ExperimentConfig {
    std::string domain = "ball:r=1.0";
    double dt = 1e-4;
    double r = 0.5;
    std::vector<double> eps = {0.1, 0.03, 0.01};
    double c0 = 1.0;  // eps_star = c0 * eps
    int replicas = 200;
    std::uint64_t base_seed = 987654321;
    int directions = 0;  // 0 -> 16 in 2D, 64 in 3D (plus normal and tangent)
    std::string out_dir = "out";
    std::size_t budget = 2'000'000;  // max steps per path simulation
    int threads = 0;                 // 0 -> hardware concurrency
    double time_horizon = 1.0;       // calibrate-localtime
    std::vector<double> thresholds = {0.05, 0.1, 0.2, 0.4};
    double displacement = 0.01;      // contraction start separation
    std::size_t steps = 100'000;     // contraction horizon
    double eps_star = 0.05;          // identity-2d threshold
    std::vector<double> z0;          // empty -> center offset to (0.2, 0, ...)

    void validate() const;

    /// Base point: configured z0, or the domain center offset to (0.2, 0, ...).
    Vec start_point(const Domain& dom) const;
};

/// Values of the flat TOML subset the config file uses: numbers, quoted
/// strings, booleans, and arrays of numbers.
using TomlValue = std::variant<double, std::string, bool, std::vector<double>>;

/// Parses flat `key = value` TOML ('#' comments, no tables). Unknown syntax
/// is rejected with a ConfigError naming the line.
std::map<std::string, TomlValue> parse_toml(const std::string& text);

/// Defaults overridden by the file's keys. Unknown keys are errors.
ExperimentConfig load_config_file(const std::string& path);

void apply_toml(ExperimentConfig& config, const std::map<std::string, TomlValue>& values);

}  // namespace rbmflow
