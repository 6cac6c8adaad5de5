#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "treecast/spin_vector.hpp"
#include "treecast/tree_shape.hpp"

namespace treecast {

// Broadcast process: each child copies its parent with probability (1+eps)/2.
struct BroadcastParams {
    double epsilon = 0.0;
    TreeShape shape{2, 1};
    std::uint64_t seed = 0;

    // eps must lie in [0,1). eps = 0 is admitted for the enumeration oracles
    // and the uninformative limit of the experiments.
    void validate() const;
    double agree_probability() const noexcept { return 0.5 * (1.0 + epsilon); }
};

// Full labeling of every node in breadth-first order.
struct LabeledTree {
    SpinVector spins;
    BroadcastParams params;

    int root() const noexcept { return spins[0]; }
    int spin(NodeId id) const noexcept { return spins[id]; }
    SpinVector leaves() const;
};

LabeledTree sample_tree(const BroadcastParams& params, std::optional<int> root = std::nullopt);

// Draws internal spins from the broadcast law conditioned on the root and
// the leaves: an upward likelihood pass, then top-down sampling of each
// child given its parent and its own subtree evidence.
LabeledTree sample_internal_given_leaves(const BroadcastParams& params, const SpinVector& leaves,
                                         int root, std::uint64_t seed);

// Exact law of the internal non-root spins given root and leaves.
// labelings[j] packs the internal non-root nodes 1..internal_count-1 as bits
// (bit i-1 set means node i is +1).
struct ConditionalLaw {
    std::vector<std::uint64_t> labelings;
    std::vector<double> probabilities;
};

inline constexpr std::uint64_t kEnumerationNodeLimit = 25;

ConditionalLaw enumerate_conditional(const BroadcastParams& params, const SpinVector& leaves, int root);

struct ModelNSample {
    int root = 1;
    SpinVector clean_leaves;
    SpinVector noisy_leaves;
};

// Broadcast sample followed by independent leaf flips with probability (1-psi)/2.
ModelNSample sample_model_N(const BroadcastParams& params, double psi, std::uint64_t seed);

// Exact P(leaves = x | root) for every leaf configuration x (index bit i is
// leaf i, set means +1), by summing edge weights over all internal labelings.
std::vector<double> exact_leaf_law(double epsilon, const TreeShape& shape, int root);

}  // namespace treecast
