#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "treecast/inference.hpp"
#include "treecast/spin_vector.hpp"
#include "treecast/tree_shape.hpp"

namespace treecast {

struct SemirandomRho {
    double rho = 0.0;
};
struct FractionRho {
    double rho = 0.0;
};
struct CFlip {
    std::uint32_t c = 0;
};
struct SpreadCK {
    std::uint32_t c = 0;
    std::uint32_t k = 1;
};

using AdversaryBudget = std::variant<SemirandomRho, FractionRho, CFlip, SpreadCK>;

void validate_budget(const AdversaryBudget& budget, const TreeShape& shape);
// "semirandom:0.125", "fraction:0.05", "cflip:2", "spread:1,2" (c then k).
AdversaryBudget parse_budget(std::string_view text);
std::string describe(const AdversaryBudget& budget);

struct Attack {
    std::vector<std::uint64_t> flipped;  // sorted, distinct leaf indices
    SpinVector leaves;                   // leaves after the flips
};

Attack make_attack(const SpinVector& leaves, std::vector<std::uint64_t> flips);

CorruptionMask sample_mask(double rho, std::uint64_t leaf_count, std::uint64_t seed);

struct Violation {
    std::string constraint;
    std::uint64_t location = 0;
};

std::optional<Violation> validate_attack(const Attack& attack, const AdversaryBudget& budget,
                                         const CorruptionMask* mask, const TreeShape& shape);

// Quantity the adversary maximizes. root_shift is |Z_root - X_root|;
// push_against_root is -root_spin * Z_root.
struct Objective {
    enum class Kind { root_shift, push_against_root };
    Kind kind = Kind::root_shift;
    int root_spin = 1;

    double operator()(const Belief& clean, const Belief& attacked) const noexcept;
};

struct ScoredAttack {
    Attack attack;
    double objective = 0.0;
};

inline constexpr std::uint64_t kBruteForceLimit = 22;

// Exact maximizer over all subsets of the permitted leaves (Gray-code order,
// one root path recomputed per step). Objective values within 1e-12
// (relative) count as ties and go to the lexicographically smallest flip set.
ScoredAttack attack_bruteforce(const SpinVector& leaves, const CorruptionMask& mask,
                               const TreeShape& shape, double epsilon, Objective objective = {},
                               LeafChannel channel = {});

// Coordinate ascent over single-leaf toggles; lowest index wins ties.
ScoredAttack attack_greedy(const SpinVector& leaves, const CorruptionMask& mask,
                           const TreeShape& shape, double epsilon, Objective objective = {},
                           std::uint32_t max_rounds = 64, LeafChannel channel = {});

Attack attack_signpush(const SpinVector& leaves, const CorruptionMask& mask, int target);

Attack attack_spread_signpush(const SpinVector& leaves, const SpreadCK& budget, int target,
                              const TreeShape& shape);

// BP state that recomputes only the path from a toggled leaf to the root.
// Its root value is bit-identical to bp_root on the current leaves.
class IncrementalBp {
public:
    IncrementalBp(const SpinVector& leaves, const TreeShape& shape, double epsilon,
                  LeafChannel channel = {});

    void toggle_leaf(std::uint64_t leaf);
    Belief root() const { return Belief::from_log_ratio(lr_[0]); }
    const SpinVector& leaves() const noexcept { return leaves_; }

private:
    void recompute(NodeId v);

    TreeShape shape_;
    double epsilon_;
    SpinVector leaves_;
    std::vector<double> lr_;   // internal nodes
    std::vector<double> msg_;  // edge_message(lr_) for internal nodes
    double msg_plus_;
};

}  // namespace treecast
