#include "treecast/harness/grids.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "treecast/broadcast.hpp"
#include "treecast/harness/parallel.hpp"
#include "treecast/inference.hpp"
#include "treecast/random.hpp"

namespace treecast::harness {

namespace {

// Grid coordinate i*step computed from the index so no drift accumulates.
double at(std::int64_t i, double step) { return static_cast<double>(i) * step; }

std::int64_t count_steps(double span, double step) { return std::llround(span / step); }

// Labels and check details; the CSV itself keeps full precision.
std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

}  // namespace

Small1Result grid_small1(double p, double hi, double step) {
    Small1Result r;
    const std::int64_t n = count_steps(hi, step);
    std::vector<double> inv(n + 1), pw(n + 1);
    for (std::int64_t i = 0; i <= n; ++i) {
        inv[i] = 1.0 / (1.0 + at(i, step));
        pw[i] = std::pow(at(i, step), p);
    }
    r.max_excess = -INFINITY;
    for (std::int64_t i = 0; i <= n; ++i) {
        for (std::int64_t j = 0; j <= n; ++j) {
            const double lhs = std::fabs(inv[i] - inv[j]);
            const double rhs = std::fabs(pw[i] - pw[j]) / p;
            ++r.points;
            r.max_excess = std::max(r.max_excess, lhs - rhs);
            // 4 ulp slack on the right side for rounding in pow and the division
            if (lhs > rhs * (1.0 + 1e-15) + 1e-300) ++r.violations;
        }
    }
    return r;
}

Small3Result grid_small3(double half_width, double step) {
    auto holds = [](double x) {
        const double f = std::sqrt((1.0 - x) / (1.0 + x));
        return f <= 1.0 - x + 0.6 * x * x + 1e-15;
    };
    Small3Result r;
    const std::int64_t n = count_steps(half_width, step);
    bool intact = true;
    for (std::int64_t i = 0; i <= n; ++i) {
        for (double x : {at(i, step), -at(i, step)}) {
            ++r.points;
            if (!holds(x)) {
                ++r.violations;
                intact = false;
            }
        }
        if (intact) r.radius = at(i, step);
    }
    // Valid only for small x; find where it first breaks.
    for (std::int64_t i = 1; at(i, step) < 1.0; ++i) {
        if (!holds(-at(i, step))) {
            r.first_violation = -at(i, step);
            break;
        }
        if (!holds(at(i, step))) {
            r.first_violation = at(i, step);
            break;
        }
    }
    return r;
}

double small4_derivative(double epsilon, double u) noexcept {
    return epsilon / (std::sqrt(1.0 - u) * std::pow(1.0 + u, 1.5));
}

double small4_kappa_closed(double epsilon) noexcept {
    return epsilon / (std::sqrt(1.0 + 4.0 * epsilon) * std::pow(1.0 - 4.0 * epsilon, 1.5));
}

Small4Result grid_small4(double epsilon, double step) {
    Small4Result r;
    r.epsilon = epsilon;
    r.kappa_closed = small4_kappa_closed(epsilon);
    const std::int64_t n = count_steps(4.0, step);
    auto g = [&](double x, double a) {
        const double u = epsilon * (x + a);
        return std::sqrt((1.0 - u) / (1.0 + u));
    };
    for (std::int64_t i = 0; i <= n; ++i) {
        const double x = -2.0 + at(i, step);
        for (std::int64_t j = 0; j <= n; ++j) {
            const double a = -2.0 + at(j, step);
            ++r.points;
            const double d = small4_derivative(epsilon, epsilon * (x + a));
            r.kappa_grid = std::max(r.kappa_grid, d);
            if ((i % 20) == 0 && (j % 20) == 0) {
                const double h = 1e-5;
                const double fd = (g(x + h, a) - g(x - h, a)) / (2.0 * h);
                r.max_fd_rel_error = std::max(r.max_fd_rel_error, std::fabs(std::fabs(fd) - d) / d);
            }
        }
    }
    return r;
}

double term_der_nu(double epsilon, double epsilon_star) noexcept {
    return epsilon_star * epsilon_star * std::pow(1.0 - epsilon, 0.25) / (8.0 * std::pow(2.0, 0.25));
}

Estimate term_der_expectation(const TermDerPoint& point, double xi, std::uint64_t trials, std::uint64_t seed,
                              unsigned workers) {
    const TreeShape shape(point.arity, point.depth);
    const double eps = point.epsilon;
    auto values = run_indexed<double>(trials, workers, [&](std::uint64_t i) {
        const std::uint64_t s = derive_seed(seed, Stream::trial, i);
        Rng rng(derive_seed(s, Stream::root, 0));
        const int child = rng.uniform() < 0.5 * (1.0 + eps) ? 1 : -1;
        BroadcastParams bp{eps, shape, derive_seed(s, Stream::tree, 0)};
        const LabeledTree tree = sample_tree(bp, child);
        const double x = bp_root(tree.leaves(), shape, eps).bias();
        const double y = std::clamp(x - xi, -1.0, 1.0);
        return std::sqrt((1.0 - eps * y) / (1.0 + eps * y));
    });
    return mean_ci(values);
}

ExperimentResult exp_inequality_grid(const ExperimentConfig& cfg, unsigned workers) {
    ExperimentResult res;
    auto exact = [](double v) { return Estimate{v, v, v, 0.0, 1}; };

    const Small1Result s1 = grid_small1();
    {
        auto e = exact(static_cast<double>(s1.violations));
        e.n = s1.points;
        res.rows.push_back(make_row(cfg, 0, 0, 0.0, "p=0.5", "grid", "small1_violations", e, "grid"));
        res.rows.push_back(make_row(cfg, 0, 0, 0.0, "p=0.5", "grid", "small1_max_excess", exact(s1.max_excess), "grid"));
        res.checks.push_back({"small1 grid [0,10]^2 step 0.01, p=1/2",
                              s1.violations == 0 ? Verdict::pass : Verdict::fail,
                              std::to_string(s1.violations) + " violations over " + std::to_string(s1.points) +
                                  " points, max lhs-rhs " + fmt(s1.max_excess)});
    }

    const Small3Result s3 = grid_small3();
    {
        auto e = exact(static_cast<double>(s3.violations));
        e.n = s3.points;
        res.rows.push_back(make_row(cfg, 0, 0, 0.0, "|x|<=0.1", "grid", "small3_violations", e, "grid"));
        res.rows.push_back(make_row(cfg, 0, 0, 0.0, "|x|<=0.1", "grid", "small3_radius", exact(s3.radius), "grid"));
        res.rows.push_back(make_row(cfg, 0, 0, 0.0, "|x|<1", "grid", "small3_first_violation",
                                    exact(s3.first_violation), "grid"));
        res.checks.push_back({"small3 grid |x|<=0.1 step 1e-4", s3.violations == 0 ? Verdict::pass : Verdict::fail,
                              "validity radius " + fmt(s3.radius) + ", first failure on the wider scan at x=" +
                                  fmt(s3.first_violation)});
    }

    for (double eps : {0.01, 0.05, 0.1}) {
        const Small4Result s4 = grid_small4(eps);
        res.rows.push_back(make_row(cfg, 0, 0, eps, "x,a in [-2,2]", "grid", "small4_kappa", exact(s4.kappa_grid), "grid"));
        res.rows.push_back(
            make_row(cfg, 0, 0, eps, "x,a in [-2,2]", "closed_form", "small4_kappa", exact(s4.kappa_closed), "closed_form"));
        const bool ok = s4.kappa_grid <= s4.kappa_closed * (1.0 + 1e-12) &&
                        std::fabs(s4.kappa_grid - s4.kappa_closed) <= 1e-12 * s4.kappa_closed &&
                        s4.max_fd_rel_error < 1e-6;
        res.checks.push_back({"small4 kappa eps=" + fmt(eps), ok ? Verdict::pass : Verdict::fail,
                              "grid " + fmt(s4.kappa_grid) + ", closed form " + fmt(s4.kappa_closed) +
                                  ", finite-difference rel error " + fmt(s4.max_fd_rel_error)});
    }

    const std::vector<TermDerPoint> points{{0.6, 0.5, 16, 2}, {0.8, 0.5, 8, 3}, {0.9, 0.8, 27, 2}};
    const std::uint64_t trials = std::min<std::uint64_t>(cfg.trials, 1u << 20);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const double nu = term_der_nu(p.epsilon, p.epsilon_star);
        for (int sign : {1, -1}) {
            const std::uint64_t seed = derive_seed(cfg.seed, Stream::instance, 2 * i + (sign > 0 ? 0 : 1));
            const Estimate e = term_der_expectation(p, sign * nu, trials, seed, workers);
            const std::string tag = "eps*=" + fmt(p.epsilon_star) + ";xi=" + fmt(sign * nu);
            res.rows.push_back(make_row(cfg, p.arity, p.depth, p.epsilon, tag, "monte_carlo", "term_der_expectation", e));
            res.checks.push_back({"term-der b=" + std::to_string(p.arity) + " k=" + std::to_string(p.depth) +
                                      " eps=" + fmt(p.epsilon) + " xi=" + fmt(sign * nu),
                                  e.ci_high < 1.0 ? Verdict::pass : (e.ci_low < 1.0 ? Verdict::inconclusive : Verdict::fail),
                                  "E = " + fmt(e.mean) + " [" + fmt(e.ci_low) + ", " + fmt(e.ci_high) + "]"});
        }
    }
    return res;
}

}  // namespace treecast::harness
