#include "treecast/broadcast.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "treecast/errors.hpp"
#include "treecast/logratio.hpp"
#include "treecast/random.hpp"

namespace treecast {

void BroadcastParams::validate() const {
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw ParameterError("epsilon must lie in [0,1), got " + std::to_string(epsilon));
}

SpinVector LabeledTree::leaves() const {
    const auto& s = params.shape;
    return spins.slice(s.level_start(s.depth()), s.leaf_count());
}

namespace {

void check_root(int root) {
    if (root != 1 && root != -1) throw ParameterError("root spin must be +1 or -1");
}

void check_leaves(const TreeShape& shape, const SpinVector& leaves) {
    if (leaves.size() != shape.leaf_count())
        throw ParameterError("expected " + std::to_string(shape.leaf_count()) + " leaves, got " +
                             std::to_string(leaves.size()));
}

// Weight of one edge under the broadcast transition.
double edge_weight(double eps, int a, int b) { return 0.5 * (1.0 + eps * a * b); }

}  // namespace

LabeledTree sample_tree(const BroadcastParams& params, std::optional<int> root) {
    params.validate();
    const TreeShape& shape = params.shape;
    Rng rng(derive_seed(params.seed, Stream::tree));
    int r = root ? *root : (Rng(derive_seed(params.seed, Stream::root)).spin());
    check_root(r);

    LabeledTree out{SpinVector(shape.node_count()), params};
    out.spins.set(0, r);
    const double p = params.agree_probability();
    const std::uint32_t b = shape.arity();
    const NodeId internal = shape.internal_count();
    NodeId c = 1;
    for (NodeId v = 0; v < internal; ++v) {
        const bool plus = out.spins.is_plus(v);
        for (std::uint32_t i = 0; i < b; ++i, ++c) {
            const bool agree = rng.uniform() < p;
            out.spins.set(c, (plus == agree) ? 1 : -1);
        }
    }
    return out;
}

LabeledTree sample_internal_given_leaves(const BroadcastParams& params, const SpinVector& leaves,
                                         int root, std::uint64_t seed) {
    params.validate();
    check_root(root);
    const TreeShape& shape = params.shape;
    check_leaves(shape, leaves);
    const double eps = params.epsilon;
    const std::uint32_t b = shape.arity();
    const NodeId n = shape.node_count();
    const NodeId internal = shape.internal_count();

    LabeledTree out{SpinVector(n), params};
    for (std::uint64_t i = 0; i < leaves.size(); ++i) out.spins.set(internal + i, leaves[i]);
    out.spins.set(0, root);
    if (internal <= 1) return out;

    // Upward pass: lr[v] = log P(subtree leaves | v=-1) / P(subtree leaves | v=+1).
    std::vector<double> lr(internal);
    const double sat = edge_message(-std::numeric_limits<double>::infinity(), eps);
    for (NodeId v = internal; v-- > 1;) {
        double acc = 0.0;
        const NodeId first = v * b + 1;
        for (std::uint32_t i = 0; i < b; ++i) {
            const NodeId c = first + i;
            acc += (c >= internal) ? (out.spins.is_plus(c) ? sat : -sat) : edge_message(lr[c], eps);
        }
        lr[v] = acc;
    }

    // Downward pass: P(v=+1 | parent, evidence) has log-odds s_parent*J - lr[v].
    Rng rng(derive_seed(seed, Stream::resample));
    const double coupling = std::log1p(eps) - std::log1p(-eps);
    for (NodeId v = 1; v < internal; ++v) {
        const int sp = out.spins[(v - 1) / b];
        const double logit = sp * coupling - lr[v];
        const double p_plus = 1.0 / (1.0 + std::exp(-logit));
        out.spins.set(v, rng.uniform() < p_plus ? 1 : -1);
    }
    return out;
}

ConditionalLaw enumerate_conditional(const BroadcastParams& params, const SpinVector& leaves, int root) {
    params.validate();
    check_root(root);
    const TreeShape& shape = params.shape;
    check_leaves(shape, leaves);
    if (shape.node_count() > kEnumerationNodeLimit)
        throw CapacityError("enumeration needs node_count <= 25, got " + std::to_string(shape.node_count()));
    const double eps = params.epsilon;
    const std::uint32_t b = shape.arity();
    const NodeId n = shape.node_count();
    const NodeId internal = shape.internal_count();
    const std::uint64_t free_nodes = internal - 1;
    const std::uint64_t count = std::uint64_t{1} << free_nodes;

    ConditionalLaw law;
    law.labelings.resize(count);
    law.probabilities.resize(count);
    std::vector<int> s(n);
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        s[0] = root;
        for (NodeId v = 1; v < internal; ++v) s[v] = ((mask >> (v - 1)) & 1U) ? 1 : -1;
        for (NodeId v = internal; v < n; ++v) s[v] = leaves[v - internal];
        double w = 1.0;
        for (NodeId v = 1; v < n; ++v) w *= edge_weight(eps, s[(v - 1) / b], s[v]);
        law.labelings[mask] = mask;
        law.probabilities[mask] = w;
        total += w;
    }
    for (auto& p : law.probabilities) p /= total;
    return law;
}

ModelNSample sample_model_N(const BroadcastParams& params, double psi, std::uint64_t seed) {
    if (!(psi > 0.0 && psi <= 1.0)) throw ParameterError("psi must lie in (0,1]");
    BroadcastParams p = params;
    p.seed = seed;
    LabeledTree tree = sample_tree(p);
    ModelNSample out{tree.root(), tree.leaves(), {}};
    out.noisy_leaves = out.clean_leaves;
    const double flip = 0.5 * (1.0 - psi);
    if (flip > 0.0) {
        Rng rng(derive_seed(seed, Stream::noise));
        for (std::uint64_t i = 0; i < out.noisy_leaves.size(); ++i)
            if (rng.uniform() < flip) out.noisy_leaves.flip(i);
    }
    return out;
}

std::vector<double> exact_leaf_law(double epsilon, const TreeShape& shape, int root) {
    check_root(root);
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in [0,1)");
    const NodeId internal = shape.internal_count();
    const std::uint64_t leaves = shape.leaf_count();
    if (leaves > 16 || internal - 1 + leaves > 24)
        throw CapacityError("leaf law enumeration needs <= 16 leaves and <= 24 free nodes");
    const std::uint32_t b = shape.arity();
    const NodeId n = shape.node_count();
    std::vector<double> law(std::uint64_t{1} << leaves, 0.0);
    std::vector<int> s(n);
    const std::uint64_t internal_configs = std::uint64_t{1} << (internal - 1);
    for (std::uint64_t im = 0; im < internal_configs; ++im) {
        s[0] = root;
        for (NodeId v = 1; v < internal; ++v) s[v] = ((im >> (v - 1)) & 1U) ? 1 : -1;
        double wi = 1.0;
        for (NodeId v = 1; v < internal; ++v) wi *= edge_weight(epsilon, s[(v - 1) / b], s[v]);
        for (std::uint64_t lm = 0; lm < law.size(); ++lm) {
            double w = wi;
            for (std::uint64_t i = 0; i < leaves; ++i) {
                const int sl = ((lm >> i) & 1U) ? 1 : -1;
                w *= edge_weight(epsilon, s[(internal + i - 1) / b], sl);
            }
            law[lm] += w;
        }
    }
    return law;
}

}  // namespace treecast
