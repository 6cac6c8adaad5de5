#include "treecast/harness/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>

#include "treecast/adversary.hpp"
#include "treecast/broadcast.hpp"
#include "treecast/coupling.hpp"
#include "treecast/errors.hpp"
#include "treecast/harness/grids.hpp"
#include "treecast/harness/pair_sampler.hpp"
#include "treecast/harness/parallel.hpp"
#include "treecast/inference.hpp"
#include "treecast/random.hpp"

namespace treecast::harness {

namespace {

// Labels and check details; the CSV itself keeps full precision.
std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

Estimate exact_estimate(double v, std::uint64_t n = 1) { return Estimate{v, v, v, 0.0, n}; }

std::vector<double> rho_values(const ExperimentConfig& cfg) {
    if (!cfg.rho.empty()) return cfg.rho;
    if (auto* s = std::get_if<SemirandomRho>(&cfg.budget)) return {s->rho};
    if (auto* f = std::get_if<FractionRho>(&cfg.budget)) return {f->rho};
    return {0.0};
}

std::uint64_t trial_seed(std::uint64_t point, std::uint64_t i) { return derive_seed(point, Stream::trial, i); }

int draw_root(std::uint64_t s) {
    Rng rng(derive_seed(s, Stream::root, 0));
    return rng.spin();
}

Check trend_check(const std::string& name, const Trend& tr) {
    return {name, tr.verdict,
            std::to_string(tr.separated_ok) + " separated as expected, " + std::to_string(tr.overlapping) +
                " overlapping, " + std::to_string(tr.separated_wrong) + " separated against"};
}

// Clean/attacked root pairs for one point under the semirandom sign-push
// attack (target -root); rho = 0 gives the clean beliefs alone.
std::vector<BeliefPair> signpush_root_pairs(const ExperimentConfig& cfg, const std::string& method,
                                            std::uint32_t b, std::uint32_t t, double eps, double rho,
                                            std::uint64_t point, unsigned workers) {
    if (method == "explicit") {
        const TreeShape shape(b, t);
        return run_indexed<BeliefPair>(cfg.trials, workers, [&](std::uint64_t i) {
            const std::uint64_t s = trial_seed(point, i);
            const int root = draw_root(s);
            const LabeledTree tree = sample_tree({eps, shape, derive_seed(s, Stream::tree, 0)}, root);
            const SpinVector clean = tree.leaves();
            if (rho == 0.0) {
                const Belief x = bp_root(clean, shape, eps);
                return BeliefPair{x.log_ratio(), 0.0};
            }
            const CorruptionMask mask = sample_mask(rho, shape.leaf_count(), derive_seed(s, Stream::mask, 0));
            const Attack a = attack_signpush(clean, mask, -root);
            return bp_paired_all_levels(clean, a.leaves, shape, eps)[0];
        });
    }
    const PairSamplerParams p{b, t, eps, rho};
    if (method == "collapsed") {
        const CollapsedPairSampler sampler(p);
        return run_indexed<BeliefPair>(cfg.trials, workers, [&](std::uint64_t i) {
            Rng rng(derive_seed(trial_seed(point, i), Stream::tree, 0));
            return sampler.sample_root(rng);
        });
    }
    return pooled_root_samples(p, cfg.trials, cfg.pool_size, derive_seed(point, Stream::pool, 0), workers);
}

}  // namespace

std::uint64_t point_seed(const ExperimentConfig& cfg, std::uint32_t b, std::uint32_t t, double epsilon) {
    const std::uint64_t base = derive_seed(cfg.seed, hash_name(cfg.id), 0);
    return derive_seed(derive_seed(base, b, t), Stream::instance, std::bit_cast<std::uint64_t>(epsilon));
}

std::string choose_sampler(const std::string& requested, std::uint32_t b, std::uint32_t t) {
    const TreeShape shape(b, t);
    if (requested == "exact") return "explicit";
    if (requested == "collapsed" || requested == "pooled") return requested;
    if (shape.leaf_count() <= (1u << 17)) return "explicit";
    if (t <= 1 || shape.level_size(t - 1) <= (1u << 18)) return "collapsed";
    return "pooled";
}

// ---------------------------------------------------------------------------

ExperimentResult exp_bp_exactness(const ExperimentConfig& cfg, unsigned workers) {
    ExperimentResult res;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes;
    for (auto b : cfg.b)
        for (auto t : cfg.t)
            if (b >= 1 && TreeShape(b, t).node_count() <= kEnumerationNodeLimit) shapes.emplace_back(b, t);
    if (shapes.empty()) throw ConfigError("experiment.t", "no (b, t) pair with at most 25 nodes");
    const std::uint64_t base = derive_seed(cfg.seed, hash_name(cfg.id), 0);

    struct Out {
        double err_perfect = -1.0;
        double err_noisy = -1.0;
        double err_zero = 0.0;
    };
    auto outs = run_indexed<Out>(cfg.trials, workers, [&](std::uint64_t i) {
        Rng rng(derive_seed(base, Stream::instance, i));
        const auto [b, t] = shapes[rng.below(shapes.size())];
        const TreeShape shape(b, t);
        double eps = rng.uniform();
        while (eps == 0.0) eps = rng.uniform();
        // Half the instances observe the leaves through a noisy channel.
        const double psi = (i % 2 == 0) ? 1.0 : 1.0 - rng.uniform();
        SpinVector leaves(shape.leaf_count());
        for (std::uint64_t j = 0; j < leaves.size(); ++j) leaves.set(j, rng.spin());
        const LeafChannel ch{psi};
        Out o;
        const double err = std::fabs(bp_root(leaves, shape, eps, ch).bias() - posterior_oracle(leaves, shape, eps, ch).bias());
        (psi == 1.0 ? o.err_perfect : o.err_noisy) = err;
        o.err_zero = std::fabs(bp_root(leaves, shape, 0.0, ch).bias()) + std::fabs(posterior_oracle(leaves, shape, 0.0, ch).bias());
        return o;
    });
    double max_p = 0.0, max_n = 0.0, max_z = 0.0;
    std::uint64_t n_p = 0, n_n = 0;
    for (const auto& o : outs) {
        if (o.err_perfect >= 0) max_p = std::max(max_p, o.err_perfect), ++n_p;
        if (o.err_noisy >= 0) max_n = std::max(max_n, o.err_noisy), ++n_n;
        max_z = std::max(max_z, o.err_zero);
    }
    res.rows.push_back(make_row(cfg, 0, 0, 0.0, "none", "oracle", "max_abs_error_psi1", exact_estimate(max_p, n_p), "enumeration"));
    res.rows.push_back(make_row(cfg, 0, 0, 0.0, "none", "oracle", "max_abs_error_psi_lt1", exact_estimate(max_n, n_n), "enumeration"));
    res.rows.push_back(make_row(cfg, 0, 0, 0.0, "none", "oracle", "max_abs_bias_eps0", exact_estimate(max_z, outs.size()), "enumeration"));
    const double max_all = std::max(max_p, max_n);
    res.checks.push_back({"bp_root matches posterior_oracle within 1e-12", max_all <= 1e-12 ? Verdict::pass : Verdict::fail,
                          "max error " + fmt(max_all) + " over " + std::to_string(outs.size()) + " instances"});
    res.checks.push_back({"eps=0 gives bias 0", max_z == 0.0 ? Verdict::pass : Verdict::fail, "max |bias| " + fmt(max_z)});
    return res;
}

// ---------------------------------------------------------------------------

ExperimentResult exp_ks_threshold(const ExperimentConfig& cfg, unsigned workers) {
    ExperimentResult res;
    for (auto b : cfg.b) {
        for (double eps : cfg.epsilon) {
            std::vector<Estimate> curve;
            const double ks = b * eps * eps;
            for (auto t : cfg.t) {
                const std::string method = choose_sampler(cfg.sampler, b, t);
                const auto pairs = signpush_root_pairs(cfg, method, b, t, eps, 0.0, point_seed(cfg, b, t, eps), workers);
                std::vector<double> mag(pairs.size());
                for (std::size_t i = 0; i < pairs.size(); ++i) mag[i] = std::fabs(pairs[i].clean().bias());
                const Estimate e = mean_ci(mag);
                curve.push_back(e);
                res.rows.push_back(make_row(cfg, b, t, eps, "b*eps^2=" + fmt(ks), "none", "mean_abs_root_bias", e, method));
            }
            const std::string tag = "b=" + std::to_string(b) + " eps=" + fmt(eps);
            if (eps == 0.0) {
                double worst_mean = 0.0;
                for (const auto& e : curve) worst_mean = std::max(worst_mean, std::fabs(e.mean));
                res.checks.push_back({"E|X_root| = 0 at " + tag, worst_mean == 0.0 ? Verdict::pass : Verdict::fail,
                                      "max mean " + fmt(worst_mean)});
            } else if (ks > 1.0) {
                // Above the threshold: bounded away from 0 and no separated decrease.
                const Trend tr = trend_non_decreasing(curve);
                Verdict v = tr.separated_wrong > 0 ? Verdict::fail : Verdict::pass;
                double min_low = 1.0;
                for (const auto& e : curve) min_low = std::min(min_low, e.ci_low);
                if (min_low <= 0.0) v = Verdict::fail;
                res.checks.push_back({"E|X_root| stays positive across t at " + tag + " (b*eps^2=" + fmt(ks) + ")", v,
                                      "smallest lower CI " + fmt(min_low) + "; " + std::to_string(tr.separated_wrong) +
                                          " CI-separated decreases, " + std::to_string(tr.overlapping) + " overlapping"});
            } else if (curve.size() > 1) {
                res.checks.push_back(trend_check("E|X_root| non-increasing in t at " + tag + " (b*eps^2=" + fmt(ks) + ")",
                                                 trend_non_increasing(curve)));
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------

ExperimentResult exp_contraction(const ExperimentConfig& cfg, unsigned workers) {
    ExperimentResult res;
    const bool compare = cfg.strategy == "greedy_vs_bruteforce";
    if (!compare && cfg.strategy != "signpush" && cfg.strategy != "greedy" && cfg.strategy != "bruteforce")
        throw ConfigError("experiment.strategy", "contraction supports signpush, greedy, bruteforce, greedy_vs_bruteforce");
    for (auto b : cfg.b) {
        for (auto t : cfg.t) {
            const TreeShape shape(b, t);
            if (shape.leaf_count() > (1u << 20)) throw CapacityError("contraction needs explicit trees; b^t too large");
            if ((compare || cfg.strategy == "bruteforce") && shape.leaf_count() > kBruteForceLimit)
                throw CapacityError("bruteforce needs at most 22 leaves");
            for (double eps : cfg.epsilon) {
                const std::uint64_t point = point_seed(cfg, b, t, eps);
                for (double rho : rho_values(cfg)) {
                    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("experiment.rho", "semirandom rho must lie in [0,1)");
                    struct Both {
                        TrialRecord main;
                        TrialRecord alt;
                    };
                    auto profile = [&](const SpinVector& clean, const SpinVector& attacked, TrialRecord& rec) {
                        const auto pairs = bp_paired_all_levels(clean, attacked, shape, eps);
                        rec.clean = pairs[0].clean().bias();
                        rec.attacked = pairs[0].attacked().bias();
                        rec.level_damage.resize(t);
                        for (std::uint32_t r = 1; r <= t; ++r) rec.level_damage[r - 1] = pairs[shape.level_start(t - r)].damage();
                    };
                    auto trials = run_indexed<Both>(cfg.trials, workers, [&](std::uint64_t i) {
                        const std::uint64_t s = trial_seed(point, i);
                        const int root = draw_root(s);
                        const LabeledTree tree = sample_tree({eps, shape, derive_seed(s, Stream::tree, 0)}, root);
                        const SpinVector clean = tree.leaves();
                        const CorruptionMask mask = sample_mask(rho, shape.leaf_count(), derive_seed(s, Stream::mask, 0));
                        Both out;
                        out.main.index = out.alt.index = i;
                        out.main.root = out.alt.root = root;
                        const Objective obj{Objective::Kind::root_shift, root};
                        if (cfg.strategy == "signpush") {
                            const Attack a = attack_signpush(clean, mask, -root);
                            out.main.flips = a.flipped.size();
                            profile(clean, a.leaves, out.main);
                        } else if (cfg.strategy == "greedy" || compare) {
                            const ScoredAttack g = attack_greedy(clean, mask, shape, eps, obj);
                            out.main.flips = g.attack.flipped.size();
                            profile(clean, g.attack.leaves, out.main);
                        }
                        if (cfg.strategy == "bruteforce" || compare) {
                            const ScoredAttack bf = attack_bruteforce(clean, mask, shape, eps, obj);
                            TrialRecord& rec = compare ? out.alt : out.main;
                            rec.flips = bf.attack.flipped.size();
                            profile(clean, bf.attack.leaves, rec);
                            if (compare && out.main.level_damage[t - 1] > rec.level_damage[t - 1] + 1e-12)
                                out.main.flags |= kFlagGreedyAbove;
                        }
                        return out;
                    });
                    auto emit = [&](const std::string& strategy, auto pick) {
                        std::vector<Estimate> levels;
                        for (std::uint32_t r = 1; r <= t; ++r) {
                            std::vector<double> v(trials.size());
                            for (std::size_t i = 0; i < trials.size(); ++i) v[i] = pick(trials[i]).level_damage[r - 1];
                            levels.push_back(mean_ci(v));
                            res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), strategy, "damage_h" + std::to_string(r),
                                                        levels.back(), "explicit"));
                        }
                        for (std::uint32_t r = 1; r < t; ++r) {
                            const Estimate& lo = levels[r - 1];
                            const Estimate& hi = levels[r];
                            if (lo.mean <= 0.0) continue;
                            // Conservative interval from the two marginal intervals.
                            Estimate q{hi.mean / lo.mean, hi.ci_low / std::max(lo.ci_high, 1e-300),
                                       lo.ci_low > 0 ? hi.ci_high / lo.ci_low : INFINITY, 0.0, lo.n};
                            q.ci_low = std::max(0.0, q.ci_low);
                            res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), strategy,
                                                        "damage_ratio_h" + std::to_string(r + 1) + "_h" + std::to_string(r), q,
                                                        "explicit"));
                        }
                        return levels;
                    };
                    const std::string tag = "b=" + std::to_string(b) + " t=" + std::to_string(t) + " eps=" + fmt(eps) +
                                            " rho=" + fmt(rho);
                    const std::string main_name = compare ? "greedy" : cfg.strategy;
                    const auto levels = emit(main_name, [](const Both& x) -> const TrialRecord& { return x.main; });
                    if (rho == 0.0) {
                        double mx = 0.0;
                        for (const auto& e : levels) mx = std::max(mx, e.mean);
                        res.checks.push_back({"zero damage at rho=0, " + tag, mx == 0.0 ? Verdict::pass : Verdict::fail,
                                              "max level mean " + fmt(mx)});
                    } else if (t > 1) {
                        res.checks.push_back(trend_check(main_name + " damage non-increasing toward the root, " + tag,
                                                         trend_non_increasing(levels)));
                    }
                    if (compare) {
                        emit("bruteforce", [](const Both& x) -> const TrialRecord& { return x.alt; });
                        std::uint64_t above = 0;
                        for (const auto& x : trials) above += (x.main.flags & kFlagGreedyAbove) ? 1 : 0;
                        res.checks.push_back({"greedy root damage <= bruteforce, " + tag,
                                              above == 0 ? Verdict::pass : Verdict::fail,
                                              std::to_string(above) + " trials where greedy exceeded the optimum"});
                    }
                }
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------

double variance_printed(std::uint32_t d, double epsilon, std::uint32_t r) {
    const double x = epsilon * epsilon * d;
    double geo = 0.0;
    for (std::uint32_t j = 0; j < r; ++j) geo += std::pow(x, j);
    return (1.0 - epsilon) * (1.0 - epsilon) * std::pow(static_cast<double>(d), r) * geo;
}

double variance_adjudicated(std::uint32_t d, double epsilon, std::uint32_t r) {
    const double x = epsilon * epsilon * d;
    double geo = 0.0;
    for (std::uint32_t j = 0; j < r; ++j) geo += std::pow(x, j);
    return (1.0 - epsilon * epsilon) * std::pow(static_cast<double>(d), r) * geo;
}

ExperimentResult exp_moment_checks(const ExperimentConfig& cfg, unsigned workers) {
    ExperimentResult res;
    for (auto b : cfg.b) {
        for (auto r : cfg.t) {
            if (r < 1) throw ConfigError("experiment.t", "moment checks need depth >= 1");
            const TreeShape shape(b, r);
            for (double eps : cfg.epsilon) {
                const std::string tag = "b=" + std::to_string(b) + " r=" + std::to_string(r) + " eps=" + fmt(eps);
                const double printed = variance_printed(b, eps, r);
                const double adjudicated = variance_adjudicated(b, eps, r);
                const double mean_formula = std::pow(eps * b, r);
                res.rows.push_back(make_row(cfg, b, r, eps, "none", "formula", "var_S_printed", exact_estimate(printed), "closed_form"));
                res.rows.push_back(make_row(cfg, b, r, eps, "none", "formula", "var_S_one_minus_eps_sq", exact_estimate(adjudicated), "closed_form"));
                res.rows.push_back(make_row(cfg, b, r, eps, "none", "formula", "mean_S", exact_estimate(mean_formula), "closed_form"));

                const std::uint64_t n = shape.leaf_count();
                if (n <= 16 && shape.internal_count() - 1 + n <= 24) {
                    const auto law = exact_leaf_law(eps, shape, 1);
                    std::vector<double> m1(law.size()), m2(law.size());
                    for (std::uint64_t x = 0; x < law.size(); ++x) {
                        const double s = 2.0 * std::popcount(x) - static_cast<double>(n);
                        m1[x] = law[x] * s;
                        m2[x] = law[x] * s * s;
                    }
                    const double mean = pairwise_sum(m1);
                    const double var = pairwise_sum(m2) - mean * mean;
                    res.rows.push_back(make_row(cfg, b, r, eps, "none", "enumeration", "var_S", exact_estimate(var), "enumeration"));
                    res.rows.push_back(make_row(cfg, b, r, eps, "none", "enumeration", "mean_S", exact_estimate(mean), "enumeration"));
                    const bool adj = std::fabs(var - adjudicated) <= 1e-12 * std::max(1.0, adjudicated);
                    const bool pri = std::fabs(var - printed) <= 1e-12 * std::max(1.0, printed);
                    res.checks.push_back({"exact Var[S_r|+] equals the (1-eps^2) formula, " + tag,
                                          adj ? Verdict::pass : Verdict::fail,
                                          "exact " + fmt(var) + ", (1-eps^2) form " + fmt(adjudicated) + ", printed (1-eps)^2 form " +
                                              fmt(printed) + (pri ? " (printed also matches)" : " (printed does not match)")});
                    res.checks.push_back({"exact E[S_r|+] = (eps b)^r, " + tag,
                                          std::fabs(mean - mean_formula) <= 1e-12 * std::max(1.0, mean_formula) ? Verdict::pass : Verdict::fail,
                                          "exact " + fmt(mean) + " vs " + fmt(mean_formula)});
                    res.notes.push_back(tag + ": exact variance " + fmt(var) + "; printed factor " +
                                        (pri ? "matches" : "does not match") + ", (1-eps^2) factor " + (adj ? "matches" : "does not match"));
                }

                const std::string method = choose_sampler(cfg.sampler, b, r);
                const std::uint64_t point = point_seed(cfg, b, r, eps);
                if (method == "explicit") {
                    struct Out {
                        double s = 0.0;
                        double x = 0.0;
                    };
                    auto outs = run_indexed<Out>(cfg.trials, workers, [&](std::uint64_t i) {
                        const std::uint64_t s = trial_seed(point, i);
                        const LabeledTree tree = sample_tree({eps, shape, derive_seed(s, Stream::tree, 0)}, 1);
                        const SpinVector leaves = tree.leaves();
                        Out o;
                        o.s = 2.0 * static_cast<double>(leaves.count_plus()) - static_cast<double>(n);
                        o.x = bp_root(leaves, shape, eps).bias();
                        return o;
                    });
                    std::vector<double> sv(outs.size()), xv(outs.size());
                    for (std::size_t i = 0; i < outs.size(); ++i) sv[i] = outs[i].s, xv[i] = outs[i].x;
                    const Estimate ve = variance_ci(sv);
                    const Estimate me = mean_ci(sv);
                    const Estimate xe = mean_ci(xv);
                    res.rows.push_back(make_row(cfg, b, r, eps, "none", "monte_carlo", "var_S", ve, method));
                    res.rows.push_back(make_row(cfg, b, r, eps, "none", "monte_carlo", "mean_S", me, method));
                    res.rows.push_back(make_row(cfg, b, r, eps, "none", "monte_carlo", "mean_root_bias_given_plus", xe, method));
                    const double z_adj = ve.std_error > 0 ? (ve.mean - adjudicated) / ve.std_error : 0.0;
                    const double z_pri = ve.std_error > 0 ? (ve.mean - printed) / ve.std_error : 0.0;
                    res.checks.push_back({"Monte Carlo Var[S_r|+] within 3 sigma of the (1-eps^2) formula, " + tag,
                                          std::fabs(z_adj) <= 3.0 ? Verdict::pass : Verdict::fail,
                                          "estimate " + fmt(ve.mean) + " (se " + fmt(ve.std_error) + "), z = " + fmt(z_adj) +
                                              "; printed form z = " + fmt(z_pri)});
                } else {
                    const auto pairs = signpush_root_pairs(cfg, method, b, r, eps, 0.0, point, workers);
                    std::vector<double> xv(pairs.size());
                    for (std::size_t i = 0; i < pairs.size(); ++i) xv[i] = pairs[i].clean().bias();
                    res.rows.push_back(make_row(cfg, b, r, eps, "none", "monte_carlo", "mean_root_bias_given_plus", mean_ci(xv), method));
                }
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------

ExperimentResult exp_lowerbound_tv(const ExperimentConfig& cfg, unsigned workers) {
    ExperimentResult res;
    const bool exact_mode = cfg.mode == "exact";
    for (auto b : cfg.b) {
        for (double eps : cfg.epsilon) {
            for (double rho : rho_values(cfg)) {
                std::vector<Estimate> failure_curve;
                for (auto t : cfg.t) {
                    const TreeShape shape(b, t);
                    CouplingParams cp{eps, shape, 0};
                    try {
                        cp.validate();
                    } catch (const std::exception& e) {
                        throw ConfigError("experiment.epsilon", e.what());
                    }
                    if (exact_mode && shape.leaf_count() > 16)
                        throw CapacityError("exact TV mode needs at most 16 leaves");
                    const std::uint64_t point = point_seed(cfg, b, t, eps);
                    struct Out {
                        std::uint64_t index = 0;
                        std::uint64_t flips = 0;
                        std::uint32_t flags = 0;
                    };
                    auto outs = run_indexed<Out>(cfg.trials, workers, [&](std::uint64_t i) {
                        const std::uint64_t s = trial_seed(point, i);
                        BroadcastParams bp = cp.broadcast_params();
                        bp.seed = derive_seed(s, Stream::tree, 0);
                        const SpinVector x = sample_tree(bp, 1).leaves();
                        CouplingParams run = cp;
                        run.seed = derive_seed(s, Stream::coupling, 0);
                        const FractionOutcome f = fraction_adversary(run, rho, x);
                        Out o;
                        o.flips = f.flip_count;
                        if (!f.coupled) o.flags |= kFlagNotCoupled;
                        if (!check_outcome(f.coupling, shape).empty()) o.flags |= kFlagAssertion;
                        if (exact_mode)
                            for (std::uint64_t j = 0; j < f.leaves.size(); ++j)
                                if (f.leaves.is_plus(j)) o.index |= std::uint64_t{1} << j;
                        return o;
                    });
                    std::uint64_t fails = 0, asserts = 0;
                    for (const auto& o : outs) {
                        fails += (o.flags & kFlagNotCoupled) ? 1 : 0;
                        asserts += (o.flags & kFlagAssertion) ? 1 : 0;
                    }
                    const std::string tag = "b=" + std::to_string(b) + " t=" + std::to_string(t) + " eps=" + fmt(eps) +
                                            " rho=" + fmt(rho);
                    const Estimate fr = proportion_ci(fails, outs.size());
                    failure_curve.push_back(fr);
                    res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), "fraction", "failure_rate", fr, "explicit"));
                    // Budget diagnostics: the flip count against the thresholds
                    // the analysis uses in place of rho * n.
                    std::vector<double> flips(outs.size());
                    for (std::size_t i = 0; i < outs.size(); ++i) flips[i] = static_cast<double>(outs[i].flips);
                    const double leaves = static_cast<double>(shape.leaf_count());
                    res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), "fraction", "mean_flip_count", mean_ci(flips), "explicit"));
                    res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), "fraction", "budget_rho_n",
                                                exact_estimate(std::floor(rho * leaves + 1e-9)), "closed_form"));
                    res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), "fraction", "analysis_threshold_4e_eps_d_minus_1",
                                                exact_estimate(std::pow(4.0 * std::exp(1.0) * eps * (b - 1.0), t)), "closed_form"));
                    res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), "fraction", "xi_pow_t_times_n",
                                                exact_estimate(std::pow(cp.xi(), t) * leaves), "closed_form"));
                    res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), "fraction", "rho_pow_t_times_n",
                                                exact_estimate(std::pow(rho, t) * leaves), "closed_form"));
                    res.checks.push_back({"coupling mark-logic and leaf-consistency assertions, " + tag,
                                          asserts == 0 ? Verdict::pass : Verdict::fail,
                                          std::to_string(asserts) + " of " + std::to_string(outs.size()) + " trials fired"});
                    if (!exact_mode) continue;

                    const auto target = exact_leaf_law(cp.broadcast_bias(), shape, -1);
                    const auto plus = exact_leaf_law(cp.broadcast_bias(), shape, 1);
                    std::vector<double> counts(target.size(), 0.0);
                    for (const auto& o : outs) counts[o.index] += 1.0;
                    const double n = static_cast<double>(outs.size());
                    std::vector<double> diff(target.size()), se(target.size()), clean(target.size());
                    for (std::size_t k = 0; k < target.size(); ++k) {
                        diff[k] = std::fabs(counts[k] / n - target[k]);
                        se[k] = std::sqrt(target[k] * (1.0 - target[k]) / n);
                        clean[k] = std::fabs(plus[k] - target[k]);
                    }
                    const double tv = 0.5 * pairwise_sum(diff);
                    const double bound = 0.5 * pairwise_sum(se);
                    const double clean_tv = 0.5 * pairwise_sum(clean);
                    res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), "fraction", "tv_to_minus_law",
                                                Estimate{tv, std::max(0.0, tv - 3 * bound), tv + 3 * bound, bound, outs.size()},
                                                "explicit"));
                    res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), "fraction", "sampling_error_bound",
                                                exact_estimate(bound, outs.size()), "closed_form"));
                    res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), "none", "clean_tv_plus_minus",
                                                exact_estimate(clean_tv), "enumeration"));
                    if (fails == 0) {
                        res.checks.push_back({"coupled law matches the root=-1 leaf law, " + tag,
                                              tv <= 3 * bound ? Verdict::pass : Verdict::fail,
                                              "L1 " + fmt(2 * tv) + " vs 3x sampling bound " + fmt(6 * bound)});
                    } else if (rho == 0.0) {
                        res.checks.push_back({"uncoupled output keeps the clean TV, " + tag,
                                              std::fabs(tv - clean_tv) <= 3 * bound ? Verdict::pass : Verdict::fail,
                                              "TV " + fmt(tv) + " vs exact clean TV " + fmt(clean_tv) + " (3x bound " + fmt(3 * bound) + ")"});
                    }
                }
                if (!exact_mode && failure_curve.size() > 1)
                    res.checks.push_back(trend_check("failure rate non-increasing in t, b=" + std::to_string(b) + " eps=" +
                                                         fmt(eps) + " rho=" + fmt(rho),
                                                     trend_non_increasing(failure_curve)));
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------

ExperimentResult exp_semirandom_robustness(const ExperimentConfig& cfg, unsigned workers) {
    ExperimentResult res;
    if (cfg.strategy == "coupling") {
        for (auto b : cfg.b) {
            for (auto t : cfg.t) {
                const TreeShape shape(b, t);
                if (shape.leaf_count() > (1u << 20)) throw CapacityError("coupling strategy needs explicit trees");
                for (double eps : cfg.epsilon) {
                    CouplingParams cp{eps, shape, 0};
                    try {
                        cp.validate();
                    } catch (const std::exception& e) {
                        throw ConfigError("experiment.epsilon", e.what());
                    }
                    const double xi = cp.xi();
                    const double bias = cp.broadcast_bias();
                    const std::uint64_t point = point_seed(cfg, b, t, eps);
                    struct Out {
                        double acc_attacked = 0.0;
                        double acc_clean = 0.0;
                        double tv = 0.0;
                        bool assertion = false;
                    };
                    auto score = [](const Belief& z, int root) {
                        return z.sign() == 0 ? 0.5 : (z.sign() == root ? 1.0 : 0.0);
                    };
                    auto outs = run_indexed<Out>(cfg.trials, workers, [&](std::uint64_t i) {
                        const std::uint64_t s = trial_seed(point, i);
                        const int root = draw_root(s);
                        BroadcastParams bp = cp.broadcast_params();
                        bp.seed = derive_seed(s, Stream::tree, 0);
                        const SpinVector clean = sample_tree(bp, root).leaves();
                        SpinVector attacked = clean;
                        Out o;
                        if (root == 1) {
                            const CorruptionMask mask = sample_mask(xi, shape.leaf_count(), derive_seed(s, Stream::mask, 0));
                            CouplingParams run = cp;
                            run.seed = derive_seed(s, Stream::coupling, 0);
                            const CouplingOutcome c = semirandom_coupling_outcome(run, mask, clean);
                            o.assertion = !check_outcome(c, shape).empty();
                            attacked = c.output;
                        }
                        const Belief x = bp_root(clean, shape, bias);
                        const Belief z = bp_root(attacked, shape, bias);
                        o.acc_attacked = score(z, root);
                        o.acc_clean = score(x, root);
                        o.tv = tv_from_biases(x, z);
                        return o;
                    });
                    std::vector<double> acc(outs.size()), accc(outs.size()), tv(outs.size());
                    std::uint64_t asserts = 0;
                    for (std::size_t i = 0; i < outs.size(); ++i) {
                        acc[i] = outs[i].acc_attacked;
                        accc[i] = outs[i].acc_clean;
                        tv[i] = outs[i].tv;
                        asserts += outs[i].assertion ? 1 : 0;
                    }
                    const std::string rho_tag = "xi=" + fmt(xi);
                    const Estimate ea = mean_ci(acc);
                    res.rows.push_back(make_row(cfg, b, t, eps, rho_tag, "coupling", "sign_accuracy_attacked", ea, "explicit"));
                    res.rows.push_back(make_row(cfg, b, t, eps, rho_tag, "coupling", "sign_accuracy_clean", mean_ci(accc), "explicit"));
                    res.rows.push_back(make_row(cfg, b, t, eps, rho_tag, "coupling", "tv_damage", mean_ci(tv), "explicit"));
                    const std::string tag = "b=" + std::to_string(b) + " t=" + std::to_string(t) + " eps=" + fmt(eps);
                    res.checks.push_back({"sgn(Z_root) at chance under the coupling adversary, " + tag,
                                          (ea.ci_low <= 0.5 && 0.5 <= ea.ci_high) ? Verdict::pass : Verdict::fail,
                                          "accuracy " + fmt(ea.mean) + " [" + fmt(ea.ci_low) + ", " + fmt(ea.ci_high) + "]"});
                    res.checks.push_back({"coupling assertions, " + tag, asserts == 0 ? Verdict::pass : Verdict::fail,
                                          std::to_string(asserts) + " trials fired"});
                }
            }
        }
        return res;
    }
    if (cfg.strategy != "signpush" && cfg.strategy != "none")
        throw ConfigError("experiment.strategy", "semirandom_robustness supports signpush, coupling, none");

    for (auto b : cfg.b) {
        for (double eps : cfg.epsilon) {
            for (double rho : rho_values(cfg)) {
                if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("experiment.rho", "semirandom rho must lie in [0,1)");
                const double r_eff = cfg.strategy == "none" ? 0.0 : rho;
                std::vector<Estimate> curve, log_curve;
                for (auto t : cfg.t) {
                    const std::string method = choose_sampler(cfg.sampler, b, t);
                    const auto pairs = signpush_root_pairs(cfg, method, b, t, eps, r_eff, point_seed(cfg, b, t, eps), workers);
                    std::vector<double> tv(pairs.size()), logs;
                    for (std::size_t i = 0; i < pairs.size(); ++i) {
                        tv[i] = 0.5 * pairs[i].damage();
                        if (tv[i] > 0.0) logs.push_back(std::log10(tv[i]));
                    }
                    curve.push_back(mean_ci(tv));
                    res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), cfg.strategy, "tv_damage", curve.back(), method));
                    // The damage is close to log-normal with a wide spread, so
                    // its mean is carried by a handful of trials; the log scale
                    // shows the bulk.
                    if (!logs.empty()) {
                        log_curve.push_back(mean_ci(logs));
                        res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), cfg.strategy, "log10_tv_damage_positive",
                                                    log_curve.back(), method));
                    }
                    res.rows.push_back(make_row(cfg, b, t, eps, fmt(rho), cfg.strategy, "zero_damage_fraction",
                                                proportion_ci(pairs.size() - logs.size(), pairs.size()), method));
                }
                const std::string tag = "b=" + std::to_string(b) + " eps=" + fmt(eps) + " rho=" + fmt(rho);
                if (r_eff == 0.0) {
                    double mx = 0.0;
                    for (const auto& e : curve) mx = std::max(mx, e.mean);
                    res.checks.push_back({"zero damage without corruption, " + tag, mx == 0.0 ? Verdict::pass : Verdict::fail,
                                          "max mean " + fmt(mx)});
                    continue;
                }
                if (curve.size() < 2) continue;
                const Trend tr = trend_non_increasing(curve);
                res.checks.push_back(trend_check("TV damage non-increasing in t, " + tag, tr));
                if (log_curve.size() == curve.size())
                    res.checks.push_back(trend_check("log10 TV damage non-increasing in t, " + tag,
                                                     trend_non_increasing(log_curve)));
                const Estimate& first = curve.front();
                const Estimate& last = curve.back();
                Verdict half = Verdict::inconclusive;
                if (last.ci_high <= 0.5 * first.ci_low) half = Verdict::pass;
                else if (last.ci_low > 0.5 * first.ci_high) half = Verdict::fail;
                res.checks.push_back({"TV damage at t=" + std::to_string(cfg.t.back()) + " at most half of t=" +
                                          std::to_string(cfg.t.front()) + ", " + tag,
                                      half,
                                      fmt(last.mean) + " [" + fmt(last.ci_low) + ", " + fmt(last.ci_high) + "] vs " +
                                          fmt(first.mean) + " [" + fmt(first.ci_low) + ", " + fmt(first.ci_high) + "]"});
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned workers) {
    if (cfg.id == "bp_exactness") return exp_bp_exactness(cfg, workers);
    if (cfg.id == "ks_threshold") return exp_ks_threshold(cfg, workers);
    if (cfg.id == "contraction") return exp_contraction(cfg, workers);
    if (cfg.id == "moment_checks") return exp_moment_checks(cfg, workers);
    if (cfg.id == "lowerbound_tv") return exp_lowerbound_tv(cfg, workers);
    if (cfg.id == "semirandom_robustness") return exp_semirandom_robustness(cfg, workers);
    if (cfg.id == "inequality_grid") return exp_inequality_grid(cfg, workers);
    throw ConfigError("experiment.id", "unknown experiment '" + cfg.id + "'");
}

}  // namespace treecast::harness
