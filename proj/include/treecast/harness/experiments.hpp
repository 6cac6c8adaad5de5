#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treecast/harness/config.hpp"
#include "treecast/harness/report.hpp"

namespace treecast::harness {

// What one trial measured. level_damage[r-1] is |X - Z| at height r on the
// first-child chain (height t is the root).
struct TrialRecord {
    std::uint64_t index = 0;
    int root = 1;
    double clean = 0.0;
    double attacked = 0.0;
    std::vector<double> level_damage;
    std::uint64_t flips = 0;
    std::uint32_t flags = 0;
};

enum TrialFlag : std::uint32_t {
    kFlagNotCoupled = 1,     // fraction adversary fell back to the input
    kFlagAssertion = 2,      // coupling outcome failed check_outcome
    kFlagGreedyAbove = 4,    // greedy beat the brute-force optimum
};

// Per-point seed: the tree stream depends on (master seed, experiment id,
// b, t, epsilon) only, so different budgets re-attack the same trees.
std::uint64_t point_seed(const ExperimentConfig& cfg, std::uint32_t b, std::uint32_t t, double epsilon);

// explicit: materialized trees; collapsed: exact level-1 collapse;
// pooled: population dynamics. "auto" picks by size.
std::string choose_sampler(const std::string& requested, std::uint32_t b, std::uint32_t t);

ExperimentResult exp_bp_exactness(const ExperimentConfig& cfg, unsigned workers);
ExperimentResult exp_ks_threshold(const ExperimentConfig& cfg, unsigned workers);
ExperimentResult exp_contraction(const ExperimentConfig& cfg, unsigned workers);
ExperimentResult exp_moment_checks(const ExperimentConfig& cfg, unsigned workers);
ExperimentResult exp_lowerbound_tv(const ExperimentConfig& cfg, unsigned workers);
ExperimentResult exp_semirandom_robustness(const ExperimentConfig& cfg, unsigned workers);

// Var[S_r | root = +1] candidates: the printed (1-eps)^2 prefactor and the
// (1-eps^2) prefactor.
double variance_printed(std::uint32_t d, double epsilon, std::uint32_t r);
double variance_adjudicated(std::uint32_t d, double epsilon, std::uint32_t r);

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned workers);

}  // namespace treecast::harness
