#pragma once

#include <cstdint>
#include <vector>

#include "treecast/inference.hpp"
#include "treecast/random.hpp"

namespace treecast::harness {

// Root (clean, attacked) belief pairs for the semirandom sign-push attack
// toward -root on perfectly observed leaves, without materializing the
// tree. The root is +1 in the sampler's frame; damage is frame-free.
//
// Every level-1 subtree is reduced to two counts: k leaves equal to +1
// (Binomial(b, (1 +- eps)/2) given the node's spin) and m of them permitted
// and flipped (Binomial(k, rho)). The joint law of the root pair is exactly
// the explicit-tree law; only the number of random draws changes.
struct PairSamplerParams {
    std::uint32_t arity = 2;
    std::uint32_t depth = 1;
    double epsilon = 0.5;
    double rho = 0.0;
};

class CollapsedPairSampler {
public:
    explicit CollapsedPairSampler(const PairSamplerParams& params);

    BeliefPair sample_root(Rng& rng) const;

    // Contribution of one level-1 node of the given spin to its parent.
    struct Message {
        double msg = 0.0;
        double dmsg = 0.0;
    };
    Message sample_level1(int spin, Rng& rng) const;
    const PairSamplerParams& params() const noexcept { return p_; }

private:
    BeliefPair sample_node(std::uint32_t height, int spin, Rng& rng) const;
    BeliefPair level1_pair(std::uint32_t k, std::uint32_t m) const;

    PairSamplerParams p_;
    double saturation_;                          // log((1+eps)/(1-eps))
    std::vector<double> k_cdf_[2];               // index 0: spin -1, 1: spin +1
    std::vector<std::vector<double>> m_cdf_;     // m_cdf_[k]
    std::vector<double> msg_;                    // by k
    std::vector<std::vector<double>> dmsg_;      // by k, m
};

// Population-dynamics variant for depths beyond explicit reach: pools of
// pool_size (message, delta) samples per spin are built level by level, each
// entry combining `arity` children drawn uniformly from the pool below. The
// first level is drawn exactly by CollapsedPairSampler. Root samples are
// independent given the pools; the pools themselves introduce a small
// resampling correlation that shrinks with pool_size.
std::vector<BeliefPair> pooled_root_samples(const PairSamplerParams& params, std::uint64_t trials,
                                            std::uint64_t pool_size, std::uint64_t seed, unsigned workers);

}  // namespace treecast::harness
