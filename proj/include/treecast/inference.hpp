#pragma once

#include <span>
#include <vector>

#include "treecast/spin_vector.hpp"
#include "treecast/tree_shape.hpp"

namespace treecast {

// Posterior of one spin: bias X with P(+1) = (1+X)/2, and its log-ratio
// log(P(-1)/P(+1)) which is the form BP actually accumulates.
class Belief {
public:
    Belief() = default;
    static Belief from_bias(double bias);
    static Belief from_log_ratio(double log_ratio);

    double bias() const noexcept { return bias_; }
    double log_ratio() const noexcept { return log_ratio_; }
    int sign() const noexcept { return bias_ > 0 ? 1 : (bias_ < 0 ? -1 : 0); }

private:
    double bias_ = 0.0;
    double log_ratio_ = 0.0;
};

// Binary symmetric observation channel on the leaves; psi = 1 is a perfect observation.
struct LeafChannel {
    double psi = 1.0;
    void validate() const;
};

Belief bp_combine(std::span<const Belief> children, double epsilon);

Belief bp_root(const SpinVector& leaves, const TreeShape& shape, double epsilon,
               LeafChannel channel = {});

// BP above a level whose beliefs are already known (one per leaf of `shape`).
Belief bp_root_from_beliefs(std::span<const Belief> leaf_beliefs, const TreeShape& shape, double epsilon);

// Belief of every node, indexed by breadth-first node id.
std::vector<Belief> bp_all_levels(const SpinVector& leaves, const TreeShape& shape, double epsilon,
                                  LeafChannel channel = {});

// Bayes' rule by brute force: sums edge weights over all internal labelings
// and both root values. With psi < 1 every leaf's true spin is summed too.
Belief posterior_oracle(const SpinVector& leaves, const TreeShape& shape, double epsilon,
                        LeafChannel channel = {});

double tv_from_biases(const Belief& x, const Belief& z) noexcept;

// Clean and attacked beliefs of one node carried together; delta is the
// attacked log-ratio minus the clean one, propagated without cancellation.
struct BeliefPair {
    double log_ratio = 0.0;
    double delta = 0.0;

    Belief clean() const { return Belief::from_log_ratio(log_ratio); }
    Belief attacked() const;
    // |X - Z|
    double damage() const noexcept;
};

std::vector<BeliefPair> bp_paired_all_levels(const SpinVector& clean, const SpinVector& attacked,
                                             const TreeShape& shape, double epsilon,
                                             LeafChannel channel = {});

}  // namespace treecast
