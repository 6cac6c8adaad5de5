#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "treecast/broadcast.hpp"
#include "treecast/spin_vector.hpp"
#include "treecast/tree_shape.hpp"

namespace treecast {

// Parameters of the marking coupling between D_t^+ and D_t^-.
//
// epsilon here is the half-bias of the coupling construction: a child agrees
// with its parent with probability 1/2 + epsilon. The broadcast law being
// coupled therefore has copy bias 2*epsilon (see broadcast_params()). With
// this reading xi = 4eps/(1+2eps) reproduces the level-1 law exactly:
// (1/2 - eps) + (1/2 + eps) xi = 1/2 + eps.
struct CouplingParams {
    double epsilon = 0.1;
    TreeShape shape{2, 1};
    std::uint64_t seed = 0;

    void validate() const;  // 0 < epsilon < 1/2
    double xi() const noexcept { return 4.0 * epsilon / (1.0 + 2.0 * epsilon); }
    double broadcast_bias() const noexcept { return 2.0 * epsilon; }
    BroadcastParams broadcast_params() const { return {broadcast_bias(), shape, seed}; }
};

struct CouplingOutcome {
    SpinVector input;                   // x
    SpinVector output;                  // pi_t(x)
    std::vector<std::uint64_t> flipped; // leaves where they differ
    SpinVector y;                       // conditional draw, root +1, leaves x
    SpinVector y_prime;                 // marked labeling, root -1
    PackedBits marked;                  // per node
};

CouplingOutcome couple_once(const CouplingParams& params, const SpinVector& x);

struct FractionOutcome {
    SpinVector leaves;
    bool coupled = false;  // true when pi_t(x) fit the budget and was returned
    std::uint64_t flip_count = 0;
    CouplingOutcome coupling;  // the full run, for assertions
};

FractionOutcome fraction_adversary(const CouplingParams& params, double rho, const SpinVector& x);

// Leaf-level xi-coins are taken from the mask (heads iff permitted), so
// every flip lands on a permitted leaf.
CouplingOutcome semirandom_coupling_outcome(const CouplingParams& params, const CorruptionMask& mask,
                                            const SpinVector& x);
SpinVector semirandom_coupling_adversary(const CouplingParams& params, const CorruptionMask& mask,
                                         const SpinVector& x);

// Marking process with an injected leaf-level coin; couple_once and the
// semirandom variant are both thin wrappers over this.
CouplingOutcome run_marking(const CouplingParams& params, const SpinVector& x,
                            const std::function<bool(std::uint64_t leaf)>& leaf_coin);

// Mark-logic and leaf-consistency checks; returns an empty string when the
// outcome is sound, else a description of the first failure.
std::string check_outcome(const CouplingOutcome& out, const TreeShape& shape);

}  // namespace treecast
