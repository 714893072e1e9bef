#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sada/estimators.hpp"

namespace sada {

// Everything needed to reproduce a run. Loaded from a key=value file and
// overridden by command-line flags.
struct RunConfig {
    std::string model = "mean";
    double level = 0.95;
    bool centering = true;
    double ridge_scale = kDefaultRidgeScale;
    std::uint64_t seed = 20250101;
    std::string methods;  // empty = command default
    int reps = 1000;
    std::vector<double> gamma_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    bool strict = true;
    std::string out = "sada_out";
    int workers = 1;
    double theta_star = 0.5;
    long N = 200;
    long n = 60;
    int passes = 1;
};

// Lines "key = value"; '#' starts a comment. Keys use the long flag names
// with '-' or '_' (e.g. ridge-scale, ridge_scale).
std::map<std::string, std::string> read_key_values(std::istream& in, const std::string& source);
std::map<std::string, std::string> read_key_values_file(const std::string& path);

// Throws ConfigError on unknown keys or malformed values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);
void validate_run_config(const RunConfig& cfg);

// "a,b,c" list or "start:stop:step" range.
std::vector<double> parse_gamma_grid(std::string_view text);

std::string serialize(const RunConfig& cfg);

EstimatorOptions estimator_options(const RunConfig& cfg);

}  // namespace sada
