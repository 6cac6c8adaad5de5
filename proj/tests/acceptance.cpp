// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Configs come from the shipped configs/ directory so the numbers here are
// the ones a user reproduces with `treecast experiment`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "treecast/broadcast.hpp"
#include "treecast/harness/config.hpp"
#include "treecast/harness/experiments.hpp"
#include "treecast/harness/grids.hpp"
#include "treecast/harness/report.hpp"
#include "treecast/random.hpp"
#include "treecast/robust.hpp"

using namespace treecast;
using namespace treecast::harness;

namespace {

const std::filesystem::path kConfigs = TREECAST_CONFIG_DIR;

// Regression constants frozen from the first run.
constexpr double kKappa[3][2] = {{0.01, 0.010425010013352028}, {0.05, 0.0637887953849786}, {0.1, 0.18184824186332699}};
constexpr double kSmall3Radius = 0.1;
constexpr double kSmall3FirstViolation = -0.1730;

std::string g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

ExperimentConfig conf(const std::string& file, std::vector<std::string> overrides = {}) {
    return load_config((kConfigs / file).string(), overrides);
}

bool all_pass(const ExperimentResult& r) {
    for (const auto& c : r.checks)
        if (c.verdict != Verdict::pass) return false;
    return !r.checks.empty();
}

void detail(const ExperimentResult& r) {
    for (const auto& c : r.checks) std::printf("      [%s] %s: %s\n", to_string(c.verdict).c_str(), c.name.c_str(), c.detail.c_str());
}

const CsvRow* find_row(const ExperimentResult& r, const std::string& metric, std::uint32_t t) {
    for (const auto& row : r.rows)
        if (row.metric_name == metric && row.t == t) return &row;
    return nullptr;
}

struct Outcome {
    bool pass = false;
    std::string summary;
};

Outcome c1(unsigned workers) {
    Timer tm;
    const auto r = run_experiment(conf("bp_exactness.conf"), workers);
    const double s = tm.seconds();
    detail(r);
    return {all_pass(r) && s < 10.0, "500 instances, " + g(s) + " s"};
}

Outcome c2(unsigned workers) {
    Timer tm;
    const auto r = run_experiment(conf("lowerbound_tv_exact.conf", {"rho=1"}), workers);
    const double s = tm.seconds();
    detail(r);
    const CsvRow* tv = find_row(r, "tv_to_minus_law", 2);
    const CsvRow* bound = find_row(r, "sampling_error_bound", 2);
    std::string sum = g(s) + " s";
    if (tv && bound) sum = "L1 " + g(2 * tv->mean) + " vs 3x bound " + g(6 * bound->mean) + ", " + sum;
    return {all_pass(r) && s < 60.0, sum};
}

Outcome c3(unsigned workers) {
    const auto r = run_experiment(conf("lowerbound_tv.conf"), workers);
    detail(r);
    bool ok = !r.checks.empty();
    for (const auto& c : r.checks) {
        const bool trend = c.name.rfind("failure rate", 0) == 0;
        // Overlapping neighbours are reported as inconclusive, which the
        // criterion admits; only a reversal or a fired assertion fails.
        if (trend ? c.verdict == Verdict::fail : c.verdict != Verdict::pass) ok = false;
    }
    std::string rates;
    for (const auto& row : r.rows)
        if (row.metric_name == "failure_rate") rates += (rates.empty() ? "" : ", ") + std::string("t=") + std::to_string(row.t) + ":" + g(row.mean);
    return {ok, "failure rate " + rates};
}

Outcome c4() {
    struct Shape {
        std::uint32_t b, t;
    };
    const std::vector<Shape> shapes{{2, 1}, {2, 2}, {2, 3}, {2, 4}, {3, 1}, {3, 2}, {4, 2}, {16, 1}};
    Rng rng(derive_seed(20240604, Stream::instance));
    std::uint64_t n = 0, upper = 0, lower = 0, lower_small_eps = 0;
    double worst_lower = 1.0;
    std::string example;
    auto check = [&](const SpinVector& x, const std::vector<std::uint64_t>& flips, const TreeShape& s, double eps,
                     double psi, std::uint32_t c) {
        const auto rc = posterior_ratio_bound_check(x, flips, s, eps, psi, c);
        ++n;
        if (rc.ratio > rc.upper) ++upper;
        if (rc.ratio < rc.lower) {
            ++lower;
            if (eps <= 0.5) ++lower_small_eps;
            if (rc.ratio / rc.lower < worst_lower) {
                worst_lower = rc.ratio / rc.lower;
                example = "b=" + std::to_string(s.arity()) + " t=" + std::to_string(s.depth()) + " eps=" + g(eps) +
                          " c=" + std::to_string(c) + " ratio " + g(rc.ratio) + " < " + g(rc.lower);
            }
        }
    };
    for (int i = 0; i < 400; ++i) {
        const Shape sh = shapes[rng.below(shapes.size())];
        const TreeShape s(sh.b, sh.t);
        double eps = rng.uniform();
        while (eps == 0.0) eps = rng.uniform();
        const std::uint32_t c = 1 + static_cast<std::uint32_t>(rng.below(2));
        const double delta = 1.0 - rng.uniform();
        SpinVector x(s.leaf_count());
        for (std::uint64_t j = 0; j < x.size(); ++j) x.set(j, rng.spin());
        std::vector<std::uint64_t> flips;
        while (flips.size() < c) {
            const std::uint64_t f = rng.below(x.size());
            if (std::find(flips.begin(), flips.end(), f) == flips.end()) flips.push_back(f);
        }
        std::sort(flips.begin(), flips.end());
        check(x, flips, s, eps, psi_for(c, delta), c);
    }
    // Fifteen '-' leaves and one '+', the '+' flipped.
    SpinVector x(16);
    x.set(0, 1);
    check(x, {0}, TreeShape(16, 1), 0.95, psi_for(1, 0.5), 1);

    std::printf("      %llu instances: %llu above e^{4 psi c}, %llu below 1 - 2 psi c (%llu of them with eps <= 1/2)\n",
                static_cast<unsigned long long>(n), static_cast<unsigned long long>(upper),
                static_cast<unsigned long long>(lower), static_cast<unsigned long long>(lower_small_eps));
    if (lower) std::printf("      worst lower-side case: %s\n", example.c_str());
    return {upper == 0 && lower == 0, "upper violations " + std::to_string(upper) + ", lower violations " +
                                          std::to_string(lower) + " over " + std::to_string(n) + " instances"};
}

Outcome c5(unsigned workers) {
    const auto r1 = run_experiment(conf("moment_checks.conf", {"b=2", "t=1", "epsilon=0.5"}), workers);
    const auto r2 = run_experiment(conf("moment_checks.conf", {"b=3", "t=2", "epsilon=0.4"}), workers);
    detail(r1);
    detail(r2);
    for (const auto& n : r1.notes) std::printf("      note: %s\n", n.c_str());
    bool ok = true;
    for (const auto* r : {&r1, &r2})
        for (const auto& c : r->checks)
            if (c.name.rfind("exact Var", 0) == 0 || c.name.rfind("Monte Carlo Var", 0) == 0)
                ok = ok && c.verdict == Verdict::pass;
    return {ok, "exact r=1 variance 1.5 vs printed 0.5; Monte Carlo r=2 against 11.1888"};
}

Outcome c6(unsigned workers) {
    Timer tm;
    const auto r = run_experiment(conf("semirandom_robustness.conf", {"t=3,6"}), workers);
    const double s = tm.seconds();
    detail(r);
    Verdict half = Verdict::fail;
    for (const auto& c : r.checks)
        if (c.name.rfind("TV damage at t=", 0) == 0) half = c.verdict;
    for (std::uint32_t t : {3U, 6U}) {
        if (const CsvRow* row = find_row(r, "log10_tv_damage_positive", t))
            std::printf("      supplement t=%u: mean log10 damage %s [%s, %s] (%s)\n", t, g(row->mean).c_str(),
                        g(row->ci_low).c_str(), g(row->ci_high).c_str(), row->method.c_str());
    }
    std::string why = to_string(half);
    if (half == Verdict::inconclusive)
        why += ": damage is heavy-tailed, the CI of the mean at t=3 reaches 0 so halving cannot be CI-separated";
    return {half == Verdict::pass, why + ", " + g(s) + " s"};
}

Outcome c7(unsigned workers) {
    const auto r = run_experiment(conf("semirandom_coupling.conf"), workers);
    detail(r);
    return {all_pass(r), "b=8 t=5 eps=0.2, 1e4 trials"};
}

Outcome c8(unsigned workers) {
    const auto r = run_experiment(conf("inequality_grid.conf"), workers);
    detail(r);
    bool ok = all_pass(r);
    for (const auto& k : kKappa) {
        const double v = grid_small4(k[0]).kappa_grid;
        if (std::fabs(v - k[1]) > 1e-12 * k[1]) {
            std::printf("      kappa eps=%s moved: %.17g vs frozen %.17g\n", g(k[0]).c_str(), v, k[1]);
            ok = false;
        }
    }
    const Small3Result s3 = grid_small3();
    if (std::fabs(s3.radius - kSmall3Radius) > 1e-12 || std::fabs(s3.first_violation - kSmall3FirstViolation) > 1e-3) {
        std::printf("      small3 moved: radius %.17g, first violation %.17g\n", s3.radius, s3.first_violation);
        ok = false;
    }
    return {ok, "grids clean; kappa and small-3 radius match the frozen constants"};
}

Outcome c9() {
    const std::vector<ExperimentConfig> cfgs{
        conf("ks_threshold.conf", {"t=4,5", "trials=300"}),
        conf("lowerbound_tv.conf", {"t=2,3", "trials=2000"}),
        conf("semirandom_robustness.conf", {"t=3,5", "trials=200", "pool_size=4096"}),
        conf("contraction_small.conf"),
    };
    bool ok = true;
    std::string ids;
    for (const auto& cfg : cfgs) {
        const std::string a = to_csv(run_experiment(cfg, 1).rows);
        const std::string b = to_csv(run_experiment(cfg, 3).rows);
        const std::string c = to_csv(run_experiment(cfg, 1).rows);
        const bool same = a == b && a == c;
        ok = ok && same;
        ids += (ids.empty() ? "" : ", ") + cfg.id + (same ? "" : " (differs)");
    }
    return {ok, "workers 1 vs 3 byte-identical: " + ids};
}

}  // namespace

int main() {
    const unsigned workers = 1;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle equivalence", [&] { return c1(workers); }},
        {"coupling law", [&] { return c2(workers); }},
        {"TV collapse trend", [&] { return c3(workers); }},
        {"psi-ratio bound", [] { return c4(); }},
        {"variance adjudication", [&] { return c5(workers); }},
        {"robustness halving", [&] { return c6(workers); }},
        {"impossibility at rho=xi", [&] { return c7(workers); }},
        {"inequality grids", [&] { return c8(workers); }},
        {"reproducibility", [] { return c9(); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::printf("C%zu %s\n", i + 1, criteria[i].first.c_str());
        std::fflush(stdout);
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        std::printf("%s C%zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.summary.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed ? 1 : 0;
}
