#pragma once

#include <string>
#include <vector>

#include "rd/driver.hpp"
#include "rd/equations.hpp"
#include "rd/errors.hpp"
#include "rd/pdhg.hpp"

namespace rd {

// Distinct failure categories so callers can map them to exit codes.
struct unknown_key_error : config_error {
    using config_error::config_error;
};

struct bad_value_error : config_error {
    using config_error::config_error;
};

// Flat run description shared by the config file and the command line.  The
// config file holds key=value lines ('#' starts a comment); keys match the
// long flag names with '-' replaced by '_'.  Unknown keys are rejected.
struct RunConfig {
    std::string equation = "allen_cahn";
    double eps0 = -1.0; // negative: use the model default
    double mu = 5.0;
    int nx = 64;
    double ht = 1e-3;
    int nt = 1;
    int windows = 1;
    std::string solver = "pdhg";
    PdhgParams params{};
    bool adaptive = false;
    double ht_cap = 0.0; // 0: defaults to 8*ht when adaptive
    int fast_iters = 200;
    std::string out = "out";
    std::vector<double> snapshot_times;
    std::vector<double> sweep_ht;
    std::vector<int> sweep_nt;
    std::vector<int> sweep_nx;
    int jobs = 1;
};

// Assigns one key.  Throws unknown_key_error / bad_value_error; both carry
// the offending key.
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);

// Reads key=value lines into cfg.  Values already present are overwritten, so
// command-line flags applied afterwards take precedence.
void load_config_file(RunConfig& cfg, const std::string& path);

// Canonical echo: every key on its own line at full precision.  Parsing the
// echo reproduces the config exactly, bit for bit.
std::string echo_config(const RunConfig& cfg);

// Range checks for every field; throws bad_value_error naming the field.
void validate_config(const RunConfig& cfg);

RDModel model_from(const RunConfig& cfg);   // throws domain_error on a bad equation
MarchPlan plan_from(const RunConfig& cfg);  // throws domain_error on a bad solver

// Machine-readable run manifest (inputs, versions, timestamp).  wall_time is
// negative before the run finishes; the caller rewrites the manifest with the
// measured value afterwards.
std::string manifest_json(const RunConfig& cfg, const std::string& command,
                          double wall_time = -1.0);

} // namespace rd
