#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "treecast/adversary.hpp"

namespace treecast::harness {

// One experiment run. Every field maps to a flat key "experiment.<name>";
// list-valued keys take comma-separated values.
struct ExperimentConfig {
    std::string id;
    std::vector<std::uint32_t> b{2};
    std::vector<std::uint32_t> t{3};
    std::vector<double> epsilon{0.3};
    AdversaryBudget budget = SemirandomRho{0.0};
    std::vector<double> rho;  // optional sweep replacing the budget's rho
    std::string strategy = "signpush";
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    std::string output = "results";
    double psi = 1.0;
    std::string mode = "exact";     // lowerbound_tv: exact | failure_rate
    std::string sampler = "auto";  // auto | exact | collapsed | pooled
    std::uint64_t pool_size = 131072;

    // Merged key/value pairs exactly as given; echoed into the sidecar.
    std::map<std::string, std::string> raw;
};

const std::vector<std::string>& config_keys();
const std::vector<std::string>& experiment_ids();

// "trials" and "experiment.trials" name the same key.
std::string normalize_key(const std::string& key);

// Builds and validates a config from key/value pairs; throws ConfigError naming the key.
ExperimentConfig config_from_pairs(const std::map<std::string, std::string>& pairs);

// Reads a flat key=value file (or a JSON sidecar's "config" object), applies
// "key=value" overrides last, then validates.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin);

}  // namespace treecast::harness
