#pragma once

#include "ringfed/metrics.hpp"
#include "ringfed/orchestrator.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ringfed {

// Key/value assignments in flag spelling, e.g. {"gamma", "0.8"}.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Applies one assignment to the config. Unknown keys and unparsable values
// throw ConfigError. A momentum of exactly 1.0 is interpreted as plain SGD
// (beta = 0), matching the tuning-grid convention.
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);

// Simple `key = value` file, # comments allowed; keys use flag spelling.
KeyValues parse_config_file(const std::string& path);

// defaults <- file <- overrides, then validate. Either source may be empty.
RunConfig resolve_config(const std::string& config_path, const KeyValues& overrides);

// Complete, ordered dump of every result-affecting field, in flag spelling.
// Feeding any echo back through apply_key reproduces the config.
KeyValues config_echo(const RunConfig& cfg);

// Hyperparameter sweep: cartesian product of the grid applied over a base
// config. Grid keys use flag spelling; an empty grid means one base run.
struct SweepSpec {
    RunConfig base;
    std::vector<std::pair<std::string, std::vector<std::string>>> grid;
};

struct SweepPoint {
    std::size_t index = 0;
    KeyValues assignment;
    RunConfig config;  // base + assignment, seed derived from (base seed, index)
};

std::vector<SweepPoint> expand_sweep(const SweepSpec& spec);

struct SweepRunResult {
    SweepPoint point;
    bool ok = false;
    std::string error;
    Summary summary;
};

struct SweepReport {
    std::vector<SweepRunResult> runs;
    // Best completed run (max tail mean) per algorithm name.
    std::map<std::string, std::size_t> best_by_algorithm;
};

// Runs every grid point over shared data. Per-run reports land in out_dir
// (as run_<index>.csv/.json) when out_dir is nonempty; failures are recorded
// and the sweep continues. parallel > 1 fans runs across threads; results
// are independent of the interleaving.
SweepReport run_sweep(const SweepSpec& spec, const Dataset& train, const Dataset& test,
                      const std::string& out_dir, int parallel = 1);

}  // namespace ringfed
