#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treecast/harness/config.hpp"
#include "treecast/harness/stats.hpp"

namespace treecast::harness {

// One aggregated point. The first twelve fields are the fixed schema;
// method names the sampler that produced the point.
struct CsvRow {
    std::string experiment;
    std::uint32_t b = 0;
    std::uint32_t t = 0;
    double epsilon = 0.0;
    std::string rho_or_budget;
    std::string strategy;
    std::uint64_t trials = 0;
    std::string metric_name;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t seed = 0;
    std::string method = "exact";
};

CsvRow make_row(const ExperimentConfig& cfg, std::uint32_t b, std::uint32_t t, double epsilon,
                std::string rho_or_budget, std::string strategy, std::string metric, const Estimate& e,
                std::string method = "exact");

// A named pass/fail assertion evaluated by an experiment.
struct Check {
    std::string name;
    Verdict verdict = Verdict::pass;
    std::string detail;
};

struct ExperimentResult {
    std::vector<CsvRow> rows;
    std::vector<Check> checks;
    std::vector<std::string> notes;

    bool failed() const;
};

std::string format_double(double x);
std::string csv_header();
std::string to_csv(const std::vector<CsvRow>& rows);
std::string sidecar_json(const ExperimentConfig& cfg, const ExperimentResult& result);

// Writes <dir>/<id>.csv and <dir>/<id>.json, creating dir. Returns the CSV path.
std::string write_outputs(const std::string& dir, const ExperimentConfig& cfg, const ExperimentResult& result);

}  // namespace treecast::harness
