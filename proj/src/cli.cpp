#include "treecast/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "treecast/adversary.hpp"
#include "treecast/broadcast.hpp"
#include "treecast/coupling.hpp"
#include "treecast/errors.hpp"
#include "treecast/harness/config.hpp"
#include "treecast/harness/experiments.hpp"
#include "treecast/harness/report.hpp"
#include "treecast/inference.hpp"
#include "treecast/random.hpp"

namespace treecast::cli {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x == 0.0 ? 0.0 : x);
    return buf;
}

int parse_spin(const std::string& s, const char* what) {
    if (s == "+" || s == "+1" || s == "1") return 1;
    if (s == "-" || s == "-1") return -1;
    throw ParameterError(std::string(what) + " must be + or -");
}

struct TreeArgs {
    std::uint32_t b = 2;
    std::uint32_t t = 1;
    double epsilon = 0.0;
};

void add_tree_args(CLI::App* app, TreeArgs& a) {
    app->add_option("--b", a.b, "arity")->required()->check(CLI::PositiveNumber);
    app->add_option("--t", a.t, "depth")->required();
    app->add_option("--epsilon", a.epsilon, "edge bias")->required();
}

SpinVector parse_leaves(const std::string& text, const TreeShape& shape) {
    SpinVector v = SpinVector::from_string(text);
    if (v.size() != shape.leaf_count())
        throw ParameterError("--leaves has " + std::to_string(v.size()) + " spins, tree has " +
                             std::to_string(shape.leaf_count()) + " leaves");
    return v;
}

void print_checks(const harness::ExperimentResult& r, std::ostream& out) {
    for (const auto& c : r.checks) {
        std::string tag = c.verdict == harness::Verdict::pass ? "PASS" : c.verdict == harness::Verdict::fail ? "FAIL" : "INCONCLUSIVE";
        out << tag << "  " << c.name << ": " << c.detail << '\n';
    }
    for (const auto& n : r.notes) out << "note  " << n << '\n';
}

}  // namespace

unsigned default_workers() {
    if (const char* env = std::getenv("TREECAST_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"treecast: broadcasting on trees under adversarial corruption"};
    app.require_subcommand(1);
    app.set_version_flag("--version", TREECAST_VERSION);

    TreeArgs tree;
    std::uint64_t seed = 1;
    std::string leaves_text;
    std::optional<std::string> root_text;
    double psi = 1.0;
    bool oracle = false;

    auto* simulate = app.add_subcommand("simulate", "sample a broadcast tree and print its leaves");
    add_tree_args(simulate, tree);
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--root", root_text, "root spin (+ or -); uniform when omitted");
    simulate->add_option("--psi", psi, "leaf channel; < 1 also prints noisy leaves");

    auto* infer = app.add_subcommand("infer", "root bias from leaf spins by belief propagation");
    add_tree_args(infer, tree);
    infer->add_option("--leaves", leaves_text, "leaf spins as +/- characters")->required();
    infer->add_option("--psi", psi, "leaf channel parameter in (0,1]");
    infer->add_flag("--oracle", oracle, "also print the brute-force posterior (small trees)");

    std::string strategy = "signpush";
    double rho = 0.0;
    std::string target_text = "-";
    auto* attack = app.add_subcommand("attack", "corrupt leaves and report the belief shift");
    add_tree_args(attack, tree);
    attack->add_option("--leaves", leaves_text, "leaf spins as +/- characters")->required();
    attack->add_option("--strategy", strategy, "signpush, greedy or bruteforce")
        ->check(CLI::IsMember({"signpush", "greedy", "bruteforce"}));
    attack->add_option("--rho", rho, "semirandom permission probability");
    attack->add_option("--seed", seed, "mask seed");
    attack->add_option("--target", target_text, "sign pushed toward (signpush)");

    std::optional<double> fraction;
    auto* couple = app.add_subcommand("couple", "run the marking coupling on a root=+ leaf configuration");
    add_tree_args(couple, tree);
    couple->add_option("--leaves", leaves_text, "leaf spins as +/- characters")->required();
    couple->add_option("--seed", seed, "coupling seed");
    couple->add_option("--rho", fraction, "fraction budget; output falls back to the input when exceeded");

    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed_override;
    unsigned workers = default_workers();
    bool strict = false;
    auto* experiment = app.add_subcommand("experiment", "run a configured experiment, write CSV and JSON");
    experiment->add_option("--config", config_path, "key=value file or JSON sidecar")->required();
    experiment->add_option("--set", overrides, "override key=value (repeatable)");
    experiment->add_option("--out", out_dir, "output directory");
    experiment->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    experiment->add_option("--seed", seed_override, "master seed");
    experiment->add_flag("--strict", strict, "exit 1 when a check fails");

    auto* verify = app.add_subcommand("verify", "oracle equivalence, inequality grids, coupling marginals");
    verify->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "master seed");
    verify->add_option("--out", out_dir, "also write CSV/JSON here");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return 2;
    }

    try {
        if (*simulate) {
            const BroadcastParams p{tree.epsilon, TreeShape(tree.b, tree.t), seed};
            std::optional<int> root;
            if (root_text) root = parse_spin(*root_text, "--root");
            if (psi < 1.0) {
                LeafChannel{psi}.validate();
                const ModelNSample s = sample_model_N(p, psi, seed);
                out << "root " << (s.root > 0 ? '+' : '-') << '\n';
                out << "leaves " << s.clean_leaves.to_string() << '\n';
                out << "noisy " << s.noisy_leaves.to_string() << '\n';
            } else {
                const LabeledTree t = sample_tree(p, root);
                out << "root " << (t.root() > 0 ? '+' : '-') << '\n';
                out << "leaves " << t.leaves().to_string() << '\n';
            }
            return 0;
        }
        if (*infer) {
            const TreeShape shape(tree.b, tree.t);
            BroadcastParams{tree.epsilon, shape, 0}.validate();
            const LeafChannel ch{psi};
            ch.validate();
            const SpinVector leaves = parse_leaves(leaves_text, shape);
            out << num(bp_root(leaves, shape, tree.epsilon, ch).bias()) << '\n';
            if (oracle) out << num(posterior_oracle(leaves, shape, tree.epsilon, ch).bias()) << '\n';
            return 0;
        }
        if (*attack) {
            const TreeShape shape(tree.b, tree.t);
            BroadcastParams{tree.epsilon, shape, 0}.validate();
            const SpinVector leaves = parse_leaves(leaves_text, shape);
            validate_budget(SemirandomRho{rho}, shape);
            const CorruptionMask mask = sample_mask(rho, shape.leaf_count(), derive_seed(seed, Stream::mask, 0));
            const Belief x = bp_root(leaves, shape, tree.epsilon);
            Attack a = make_attack(leaves, {});
            if (strategy == "signpush") {
                a = attack_signpush(leaves, mask, parse_spin(target_text, "--target"));
            } else {
                const Objective obj{Objective::Kind::root_shift, x.sign() >= 0 ? 1 : -1};
                a = strategy == "greedy" ? attack_greedy(leaves, mask, shape, tree.epsilon, obj).attack
                                         : attack_bruteforce(leaves, mask, shape, tree.epsilon, obj).attack;
            }
            const Belief z = bp_root(a.leaves, shape, tree.epsilon);
            out << "mask " << mask.to_string() << '\n';
            out << "leaves " << a.leaves.to_string() << '\n';
            out << "flips " << a.flipped.size() << '\n';
            out << "clean " << num(x.bias()) << '\n';
            out << "attacked " << num(z.bias()) << '\n';
            return 0;
        }
        if (*couple) {
            const TreeShape shape(tree.b, tree.t);
            const CouplingParams p{tree.epsilon, shape, seed};
            p.validate();
            const SpinVector x = parse_leaves(leaves_text, shape);
            if (fraction) {
                const FractionOutcome f = fraction_adversary(p, *fraction, x);
                out << "leaves " << f.leaves.to_string() << '\n';
                out << "flips " << f.flip_count << '\n';
                out << "coupled " << (f.coupled ? "yes" : "no") << '\n';
            } else {
                const CouplingOutcome c = couple_once(p, x);
                out << "leaves " << c.output.to_string() << '\n';
                out << "flips " << c.flipped.size() << '\n';
            }
            return 0;
        }
        if (*experiment) {
            if (seed_override) overrides.push_back("experiment.seed=" + std::to_string(*seed_override));
            if (out_dir) overrides.push_back("experiment.output=" + *out_dir);
            const harness::ExperimentConfig cfg = harness::load_config(config_path, overrides);
            const harness::ExperimentResult r = harness::run_experiment(cfg, workers);
            const std::string path = harness::write_outputs(cfg.output, cfg, r);
            print_checks(r, out);
            out << "wrote " << path << '\n';
            return (strict && r.failed()) ? 1 : 0;
        }
        if (*verify) {
            const std::string s = std::to_string(seed);
            const std::vector<std::map<std::string, std::string>> runs{
                {{"experiment.id", "bp_exactness"}, {"experiment.b", "2,3"}, {"experiment.t", "1,2,3"},
                 {"experiment.trials", "500"}, {"experiment.seed", s}},
                {{"experiment.id", "inequality_grid"}, {"experiment.trials", "2000"}, {"experiment.seed", s}},
                {{"experiment.id", "lowerbound_tv"}, {"experiment.b", "2"}, {"experiment.t", "2"},
                 {"experiment.epsilon", "0.25"}, {"experiment.rho", "1"}, {"experiment.mode", "exact"},
                 {"experiment.trials", "200000"}, {"experiment.seed", s}},
            };
            bool failed = false;
            for (auto pairs : runs) {
                if (out_dir) pairs["experiment.output"] = *out_dir;
                const harness::ExperimentConfig cfg = harness::config_from_pairs(pairs);
                out << "== " << cfg.id << '\n';
                const harness::ExperimentResult r = harness::run_experiment(cfg, workers);
                print_checks(r, out);
                if (out_dir) harness::write_outputs(*out_dir, cfg, r);
                failed = failed || r.failed();
            }
            out << (failed ? "verify: FAILED" : "verify: ok") << '\n';
            return failed ? 1 : 0;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ParameterError& e) {
        // Bad flags on the single-shot commands are usage errors; inside an
        // experiment run the same exception is a runtime failure.
        if (*experiment || *verify) {
            err << "error: " << e.what() << '\n';
            return 1;
        }
        err << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace treecast::cli
