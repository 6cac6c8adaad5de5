#include "treecast/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "treecast/errors.hpp"

#ifndef TREECAST_VERSION
#define TREECAST_VERSION "unknown"
#endif

namespace treecast::harness {

CsvRow make_row(const ExperimentConfig& cfg, std::uint32_t b, std::uint32_t t, double epsilon,
                std::string rho_or_budget, std::string strategy, std::string metric, const Estimate& e,
                std::string method) {
    CsvRow r;
    r.experiment = cfg.id;
    r.b = b;
    r.t = t;
    r.epsilon = epsilon;
    r.rho_or_budget = std::move(rho_or_budget);
    r.strategy = std::move(strategy);
    r.trials = e.n;
    r.metric_name = std::move(metric);
    r.mean = e.mean;
    r.ci_low = e.ci_low;
    r.ci_high = e.ci_high;
    r.seed = cfg.seed;
    r.method = std::move(method);
    return r;
}

bool ExperimentResult::failed() const {
    for (const auto& c : checks)
        if (c.verdict == Verdict::fail) return true;
    return false;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";  // folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string csv_header() {
    return "experiment,b,t,epsilon,rho_or_budget,strategy,trials,metric_name,mean,ci_low,ci_high,seed,method,"
           "ci_method";
}

std::string to_csv(const std::vector<CsvRow>& rows) {
    std::ostringstream out;
    out << csv_header() << '\n';
    for (const auto& r : rows) {
        out << quote(r.experiment) << ',' << r.b << ',' << r.t << ',' << format_double(r.epsilon) << ','
            << quote(r.rho_or_budget) << ',' << quote(r.strategy) << ',' << r.trials << ','
            << quote(r.metric_name) << ',' << format_double(r.mean) << ',' << format_double(r.ci_low) << ','
            << format_double(r.ci_high) << ',' << r.seed << ',' << quote(r.method) << ',' << kCiMethod << '\n';
    }
    return out.str();
}

std::string sidecar_json(const ExperimentConfig& cfg, const ExperimentResult& result) {
    nlohmann::ordered_json doc;
    doc["software"] = "treecast";
    doc["version"] = TREECAST_VERSION;
    doc["ci_method"] = kCiMethod;
    doc["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.raw) doc["config"][k] = v;
    doc["rows"] = result.rows.size();
    auto checks = nlohmann::ordered_json::array();
    for (const auto& c : result.checks)
        checks.push_back({{"name", c.name}, {"verdict", to_string(c.verdict)}, {"detail", c.detail}});
    doc["checks"] = checks;
    doc["notes"] = result.notes;
    return doc.dump(2) + "\n";
}

std::string write_outputs(const std::string& dir, const ExperimentConfig& cfg, const ExperimentResult& result) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    const fs::path csv = fs::path(dir) / (cfg.id + ".csv");
    const fs::path json = fs::path(dir) / (cfg.id + ".json");
    {
        std::ofstream out(csv, std::ios::binary);
        out << to_csv(result.rows);
        if (!out) throw std::runtime_error("failed writing " + csv.string());
    }
    {
        std::ofstream out(json, std::ios::binary);
        out << sidecar_json(cfg, result);
        if (!out) throw std::runtime_error("failed writing " + json.string());
    }
    return csv.string();
}

}  // namespace treecast::harness
