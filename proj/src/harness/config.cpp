#include "treecast/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "treecast/errors.hpp"

namespace treecast::harness {

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "experiment.id",     "experiment.b",       "experiment.t",       "experiment.epsilon",
        "experiment.budget", "experiment.rho",     "experiment.strategy", "experiment.trials",
        "experiment.seed",   "experiment.output",  "experiment.psi",     "experiment.mode",
        "experiment.sampler", "experiment.pool_size"};
    return keys;
}

const std::vector<std::string>& experiment_ids() {
    static const std::vector<std::string> ids{"bp_exactness", "ks_threshold", "contraction",
                                              "moment_checks", "lowerbound_tv", "semirandom_robustness",
                                              "inequality_grid"};
    return ids;
}

std::string normalize_key(const std::string& key) {
    if (key.find('.') == std::string::npos) return "experiment." + key;
    return key;
}

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key, "not a number: '" + v + "'");
    return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(key, "not a non-negative integer: '" + v + "'");
    return x;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F conv) {
    std::vector<T> out;
    for (const auto& item : split_list(v)) out.push_back(static_cast<T>(conv(key, item)));
    if (out.empty()) throw ConfigError(key, "empty list");
    return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno), "expected key=value");
        out[normalize_key(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
    }
    return out;
}

ExperimentConfig config_from_pairs(const std::map<std::string, std::string>& pairs) {
    const auto& keys = config_keys();
    for (const auto& [k, v] : pairs)
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError(k, "unknown key");
    for (const char* req : {"experiment.id", "experiment.trials"})
        if (!pairs.count(req)) throw ConfigError(req, "missing required key");

    ExperimentConfig c;
    c.raw = pairs;
    auto get = [&](const char* k) -> const std::string* {
        auto it = pairs.find(k);
        return it == pairs.end() ? nullptr : &it->second;
    };
    c.id = *get("experiment.id");
    const auto& ids = experiment_ids();
    if (std::find(ids.begin(), ids.end(), c.id) == ids.end())
        throw ConfigError("experiment.id", "unknown experiment '" + c.id + "'");

    if (auto v = get("experiment.b")) {
        c.b = parse_list<std::uint32_t>("experiment.b", *v, to_uint);
        for (auto b : c.b)
            if (b < 1 || b > 4096) throw ConfigError("experiment.b", "arity must lie in 1..4096");
    }
    if (auto v = get("experiment.t")) {
        c.t = parse_list<std::uint32_t>("experiment.t", *v, to_uint);
        for (auto t : c.t)
            if (t > 60) throw ConfigError("experiment.t", "depth must be <= 60");
    }
    if (auto v = get("experiment.epsilon")) {
        c.epsilon = parse_list<double>("experiment.epsilon", *v, to_double);
        for (auto e : c.epsilon)
            if (!(e >= 0.0 && e < 1.0)) throw ConfigError("experiment.epsilon", "must lie in [0,1), got " + *v);
    }
    if (auto v = get("experiment.budget")) {
        try {
            c.budget = parse_budget(*v);
        } catch (const std::exception& e) {
            throw ConfigError("experiment.budget", e.what());
        }
        std::visit(
            [](const auto& b) {
                using B = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<B, SemirandomRho>) {
                    if (!(b.rho >= 0.0 && b.rho < 1.0)) throw ConfigError("experiment.budget", "rho must lie in [0,1)");
                } else if constexpr (std::is_same_v<B, FractionRho>) {
                    if (!(b.rho >= 0.0 && b.rho <= 1.0)) throw ConfigError("experiment.budget", "rho must lie in [0,1]");
                } else if constexpr (std::is_same_v<B, SpreadCK>) {
                    if (b.k < 1) throw ConfigError("experiment.budget", "spread k must be >= 1");
                }
            },
            c.budget);
    }
    if (auto v = get("experiment.rho")) {
        c.rho = parse_list<double>("experiment.rho", *v, to_double);
        for (auto r : c.rho)
            if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("experiment.rho", "must lie in [0,1]");
    }
    if (auto v = get("experiment.strategy")) c.strategy = *v;
    c.trials = to_uint("experiment.trials", *get("experiment.trials"));
    if (c.trials < 1) throw ConfigError("experiment.trials", "must be >= 1");
    if (auto v = get("experiment.seed")) c.seed = to_uint("experiment.seed", *v);
    if (auto v = get("experiment.output")) c.output = *v;
    if (auto v = get("experiment.psi")) {
        c.psi = to_double("experiment.psi", *v);
        if (!(c.psi > 0.0 && c.psi <= 1.0)) throw ConfigError("experiment.psi", "must lie in (0,1]");
    }
    if (auto v = get("experiment.mode")) {
        c.mode = *v;
        if (c.mode != "exact" && c.mode != "failure_rate")
            throw ConfigError("experiment.mode", "expected exact or failure_rate");
    }
    if (auto v = get("experiment.sampler")) {
        c.sampler = *v;
        if (c.sampler != "auto" && c.sampler != "exact" && c.sampler != "collapsed" && c.sampler != "pooled")
            throw ConfigError("experiment.sampler", "expected auto, exact, collapsed or pooled");
    }
    if (auto v = get("experiment.pool_size")) {
        c.pool_size = to_uint("experiment.pool_size", *v);
        if (c.pool_size < 1) throw ConfigError("experiment.pool_size", "must be >= 1");
    }
    static const std::vector<std::string> strategies{"signpush", "greedy", "bruteforce", "greedy_vs_bruteforce",
                                                     "coupling", "fraction", "spread", "none"};
    if (std::find(strategies.begin(), strategies.end(), c.strategy) == strategies.end())
        throw ConfigError("experiment.strategy", "unknown strategy '" + c.strategy + "'");
    return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::map<std::string, std::string> pairs;
    const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    if (is_json) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(buf.str());
        } catch (const std::exception& e) {
            throw ConfigError("config", std::string("invalid JSON: ") + e.what());
        }
        if (!doc.contains("config") || !doc["config"].is_object())
            throw ConfigError("config", "JSON document lacks a \"config\" object");
        for (auto& [k, v] : doc["config"].items()) {
            if (!v.is_string()) throw ConfigError(k, "sidecar values must be strings");
            pairs[normalize_key(k)] = v.get<std::string>();
        }
    } else {
        pairs = parse_key_values(buf.str(), path);
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError(o, "override must be key=value");
        pairs[normalize_key(trim(o.substr(0, eq)))] = trim(o.substr(eq + 1));
    }
    return config_from_pairs(pairs);
}

}  // namespace treecast::harness
