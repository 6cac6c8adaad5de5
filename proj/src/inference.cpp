#include "treecast/inference.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "treecast/errors.hpp"
#include "treecast/logratio.hpp"

namespace treecast {

Belief Belief::from_bias(double bias) {
    if (!(bias >= -1.0 && bias <= 1.0)) throw ParameterError("bias must lie in [-1,1]");
    Belief b;
    b.bias_ = bias;
    b.log_ratio_ = log_ratio_from_bias(bias);
    return b;
}

Belief Belief::from_log_ratio(double log_ratio) {
    if (std::isnan(log_ratio)) throw ParameterError("log-ratio is NaN");
    Belief b;
    b.log_ratio_ = log_ratio;
    b.bias_ = bias_from_log_ratio(log_ratio);
    return b;
}

void LeafChannel::validate() const {
    if (!(psi > 0.0 && psi <= 1.0)) throw ParameterError("psi must lie in (0,1]");
}

namespace {

void check_epsilon(double eps) {
    if (!(eps >= 0.0 && eps < 1.0)) throw ParameterError("epsilon must lie in [0,1)");
}

void check_leaves(const TreeShape& shape, const SpinVector& leaves) {
    if (leaves.size() != shape.leaf_count())
        throw ParameterError("expected " + std::to_string(shape.leaf_count()) + " leaves, got " +
                             std::to_string(leaves.size()));
}

// Log-ratio of a leaf observed as +1 through the channel.
double leaf_log_ratio_plus(double psi) {
    if (psi >= 1.0) return -std::numeric_limits<double>::infinity();
    return log_ratio_from_bias(psi);
}

// Fills lr for every node; leaves first, then one sweep per level.
void sweep(std::vector<double>& lr, const SpinVector& leaves, const TreeShape& shape, double eps,
           double psi) {
    const NodeId internal = shape.internal_count();
    const std::uint32_t b = shape.arity();
    const double leaf_plus = leaf_log_ratio_plus(psi);
    const double msg_plus = edge_message(leaf_plus, eps);
    for (std::uint64_t i = 0; i < leaves.size(); ++i)
        lr[internal + i] = leaves.is_plus(i) ? leaf_plus : -leaf_plus;
    const NodeId first_parent_of_leaves = shape.depth() ? shape.level_start(shape.depth() - 1) : 0;
    for (NodeId v = internal; v-- > 0;) {
        double acc = 0.0;
        const NodeId first = v * b + 1;
        if (v >= first_parent_of_leaves) {
            for (std::uint32_t i = 0; i < b; ++i)
                acc += leaves.is_plus(first + i - internal) ? msg_plus : -msg_plus;
        } else {
            for (std::uint32_t i = 0; i < b; ++i) acc += edge_message(lr[first + i], eps);
        }
        lr[v] = acc;
    }
}

}  // namespace

Belief bp_combine(std::span<const Belief> children, double epsilon) {
    check_epsilon(epsilon);
    double acc = 0.0;
    for (const auto& c : children) acc += edge_message(c.log_ratio(), epsilon);
    return Belief::from_log_ratio(acc);
}

std::vector<Belief> bp_all_levels(const SpinVector& leaves, const TreeShape& shape, double epsilon,
                                  LeafChannel channel) {
    check_epsilon(epsilon);
    channel.validate();
    check_leaves(shape, leaves);
    std::vector<double> lr(shape.node_count());
    sweep(lr, leaves, shape, epsilon, channel.psi);
    std::vector<Belief> out(lr.size());
    for (std::size_t i = 0; i < lr.size(); ++i) out[i] = Belief::from_log_ratio(lr[i]);
    return out;
}

Belief bp_root(const SpinVector& leaves, const TreeShape& shape, double epsilon, LeafChannel channel) {
    check_epsilon(epsilon);
    channel.validate();
    check_leaves(shape, leaves);
    std::vector<double> lr(shape.node_count());
    sweep(lr, leaves, shape, epsilon, channel.psi);
    return Belief::from_log_ratio(lr[0]);
}

Belief bp_root_from_beliefs(std::span<const Belief> leaf_beliefs, const TreeShape& shape, double epsilon) {
    check_epsilon(epsilon);
    if (leaf_beliefs.size() != shape.leaf_count()) throw ParameterError("belief count differs from leaf count");
    const NodeId internal = shape.internal_count();
    const std::uint32_t b = shape.arity();
    std::vector<double> lr(shape.node_count());
    for (std::size_t i = 0; i < leaf_beliefs.size(); ++i) lr[internal + i] = leaf_beliefs[i].log_ratio();
    for (NodeId v = internal; v-- > 0;) {
        double acc = 0.0;
        for (std::uint32_t i = 0; i < b; ++i) acc += edge_message(lr[v * b + 1 + i], epsilon);
        lr[v] = acc;
    }
    return Belief::from_log_ratio(lr[0]);
}

Belief posterior_oracle(const SpinVector& leaves, const TreeShape& shape, double epsilon,
                        LeafChannel channel) {
    check_epsilon(epsilon);
    channel.validate();
    check_leaves(shape, leaves);
    if (shape.node_count() > 25)
        throw CapacityError("posterior_oracle needs node_count <= 25, got " +
                            std::to_string(shape.node_count()));
    const NodeId internal = shape.internal_count();
    const NodeId n = shape.node_count();
    const std::uint32_t b = shape.arity();
    const double psi = channel.psi;
    auto edge = [epsilon](int a, int c) { return 0.5 * (1.0 + epsilon * a * c); };
    auto obs = [psi](int truth, int seen) { return 0.5 * (1.0 + psi * truth * seen); };

    std::vector<int> s(internal);
    double w_plus = 0.0;
    double w_minus = 0.0;
    const std::uint64_t configs = std::uint64_t{1} << internal;
    for (std::uint64_t m = 0; m < configs; ++m) {
        for (NodeId v = 0; v < internal; ++v) s[v] = ((m >> v) & 1U) ? 1 : -1;
        double w = 1.0;
        for (NodeId v = 1; v < internal; ++v) w *= edge(s[(v - 1) / b], s[v]);
        for (NodeId v = internal; v < n; ++v) {
            const int parent = s[(v - 1) / b];
            const int seen = leaves[v - internal];
            if (psi >= 1.0) {
                w *= edge(parent, seen);
            } else {
                w *= edge(parent, 1) * obs(1, seen) + edge(parent, -1) * obs(-1, seen);
            }
        }
        if (s[0] > 0) w_plus += w;
        else w_minus += w;
    }
    return Belief::from_bias((w_plus - w_minus) / (w_plus + w_minus));
}

double tv_from_biases(const Belief& x, const Belief& z) noexcept {
    return 0.5 * std::fabs(x.bias() - z.bias());
}

Belief BeliefPair::attacked() const {
    if (std::isinf(log_ratio)) return Belief::from_log_ratio(std::isinf(delta) ? -log_ratio : log_ratio);
    return Belief::from_log_ratio(log_ratio + delta);
}

double BeliefPair::damage() const noexcept { return bias_gap(log_ratio, delta); }

std::vector<BeliefPair> bp_paired_all_levels(const SpinVector& clean, const SpinVector& attacked,
                                             const TreeShape& shape, double epsilon,
                                             LeafChannel channel) {
    check_epsilon(epsilon);
    channel.validate();
    check_leaves(shape, clean);
    check_leaves(shape, attacked);
    const NodeId internal = shape.internal_count();
    const std::uint32_t b = shape.arity();
    std::vector<BeliefPair> out(shape.node_count());
    const double leaf_plus = leaf_log_ratio_plus(channel.psi);
    const double msg_plus = edge_message(leaf_plus, epsilon);
    for (std::uint64_t i = 0; i < clean.size(); ++i) {
        const double x = clean.is_plus(i) ? leaf_plus : -leaf_plus;
        const double z = attacked.is_plus(i) ? leaf_plus : -leaf_plus;
        out[internal + i] = {x, clean[i] == attacked[i] ? 0.0 : z - x};
    }
    const NodeId first_parent_of_leaves = shape.depth() ? shape.level_start(shape.depth() - 1) : 0;
    for (NodeId v = internal; v-- > 0;) {
        double acc = 0.0;
        double dacc = 0.0;
        const NodeId first = v * b + 1;
        if (v >= first_parent_of_leaves) {
            for (std::uint32_t i = 0; i < b; ++i) {
                const std::uint64_t leaf = first + i - internal;
                const double mx = clean.is_plus(leaf) ? msg_plus : -msg_plus;
                const double mz = attacked.is_plus(leaf) ? msg_plus : -msg_plus;
                acc += mx;
                dacc += mz - mx;
            }
        } else {
            for (std::uint32_t i = 0; i < b; ++i) {
                const BeliefPair& c = out[first + i];
                acc += edge_message(c.log_ratio, epsilon);
                dacc += edge_message_delta(c.log_ratio, c.delta, epsilon);
            }
        }
        out[v] = {acc, dacc};
    }
    return out;
}

}  // namespace treecast
