#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "treecast/inference.hpp"
#include "treecast/spin_vector.hpp"
#include "treecast/tree_shape.hpp"

namespace treecast {

// psi = min{delta/(8c), ln(1+delta/4)/(4c)}; c >= 1, delta > 0.
double psi_for(std::uint32_t c, double delta);
// Default block height ceil(log2(c+1)) + 2.
std::uint32_t default_block_height(std::uint32_t c);

struct RobustParams {
    std::uint32_t c = 1;
    double delta = 0.2;
    std::optional<std::uint32_t> k;  // block height; default_block_height(c) when unset
    double epsilon = 0.5;
    TreeShape shape{2, 1};
    std::uint32_t averaging = 1;  // noise masks averaged per A_N call

    void validate() const;
    double psi() const { return psi_for(c, delta); }
    std::uint32_t block_height() const { return k ? *k : default_block_height(c); }
};

// XOR fresh Bernoulli((1-psi)/2) noise into the leaves, then BP with LeafChannel(psi).
// With averaging m > 1 the biases of m independent draws are averaged.
Belief noisy_posterior_AN(const SpinVector& leaves, const TreeShape& shape, double epsilon, double psi,
                          std::uint64_t seed, std::uint32_t averaging = 1);

// Exact P_N(root = +1 | leaves) under leaf channel psi, by enumeration.
double model_N_posterior_plus(const SpinVector& leaves, const TreeShape& shape, double epsilon, double psi);

struct RatioCheck {
    double ratio = 1.0;
    double lower = 1.0;  // 1 - 2 psi c
    double upper = 1.0;  // exp(4 psi c)
    bool within = true;
};

// P_N(+ | x with flips) / P_N(+ | x), checked against [1 - 2 psi c, e^{4 psi c}].
RatioCheck posterior_ratio_bound_check(const SpinVector& leaves, std::span<const std::uint64_t> flips,
                                       const TreeShape& shape, double epsilon, double psi, std::uint32_t c);

struct SpreadResult {
    Belief root;
    std::vector<Belief> block_beliefs;  // one per level-(t-k) node
};

SpreadResult spread_alg_detail(const SpinVector& corrupted, const RobustParams& params, std::uint64_t seed);
Belief spread_alg(const SpinVector& corrupted, const RobustParams& params, std::uint64_t seed);

// A_N on one height-k block; noise streams are indexed by the block number,
// so block 0 of a single-block tree matches noisy_posterior_AN.
Belief block_posterior(const SpinVector& block_leaves, const TreeShape& block_shape, double epsilon,
                       double psi, std::uint64_t seed, std::uint64_t block, std::uint32_t averaging);

}  // namespace treecast
