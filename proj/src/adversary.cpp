#include "treecast/adversary.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>

#include "treecast/errors.hpp"
#include "treecast/logratio.hpp"
#include "treecast/random.hpp"

namespace treecast {

void validate_budget(const AdversaryBudget& budget, const TreeShape& shape) {
    std::visit(
        [&](const auto& b) {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, SemirandomRho>) {
                if (!(b.rho >= 0.0 && b.rho < 1.0)) throw ParameterError("semirandom rho must lie in [0,1)");
            } else if constexpr (std::is_same_v<B, FractionRho>) {
                if (!(b.rho >= 0.0 && b.rho <= 1.0)) throw ParameterError("fraction rho must lie in [0,1]");
            } else if constexpr (std::is_same_v<B, SpreadCK>) {
                if (b.k < 1 || b.k > shape.depth()) throw ParameterError("spread k must lie in 1..depth");
            }
        },
        budget);
}

namespace {

double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParameterError("bad number '" + std::string(s) + "' in " + std::string(what));
    return v;
}

std::uint32_t parse_uint(std::string_view s, std::string_view what) {
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParameterError("bad integer '" + std::string(s) + "' in " + std::string(what));
    return v;
}

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

}  // namespace

AdversaryBudget parse_budget(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw ParameterError("budget needs kind:value, got '" + std::string(text) + "'");
    const auto kind = text.substr(0, colon);
    const auto arg = text.substr(colon + 1);
    if (kind == "semirandom") return SemirandomRho{parse_double(arg, text)};
    if (kind == "fraction") return FractionRho{parse_double(arg, text)};
    if (kind == "cflip") return CFlip{parse_uint(arg, text)};
    if (kind == "spread") {
        const auto comma = arg.find(',');
        if (comma == std::string_view::npos) throw ParameterError("spread budget needs c,k");
        return SpreadCK{parse_uint(arg.substr(0, comma), text), parse_uint(arg.substr(comma + 1), text)};
    }
    throw ParameterError("unknown budget kind '" + std::string(kind) + "'");
}

std::string describe(const AdversaryBudget& budget) {
    return std::visit(
        [](const auto& b) -> std::string {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, SemirandomRho>) return "semirandom:" + format_double(b.rho);
            else if constexpr (std::is_same_v<B, FractionRho>) return "fraction:" + format_double(b.rho);
            else if constexpr (std::is_same_v<B, CFlip>) return "cflip:" + std::to_string(b.c);
            else return "spread:" + std::to_string(b.c) + "," + std::to_string(b.k);
        },
        budget);
}

Attack make_attack(const SpinVector& leaves, std::vector<std::uint64_t> flips) {
    std::sort(flips.begin(), flips.end());
    flips.erase(std::unique(flips.begin(), flips.end()), flips.end());
    Attack a{std::move(flips), leaves};
    for (auto i : a.flipped) {
        if (i >= leaves.size()) throw RangeError("flip index " + std::to_string(i) + " out of range");
        a.leaves.flip(i);
    }
    return a;
}

CorruptionMask sample_mask(double rho, std::uint64_t leaf_count, std::uint64_t seed) {
    if (!(rho >= 0.0 && rho < 1.0)) throw ParameterError("rho must lie in [0,1)");
    PackedBits bits(leaf_count);
    Rng rng(derive_seed(seed, Stream::mask));
    for (std::uint64_t i = 0; i < leaf_count; ++i)
        if (rng.uniform() < rho) bits.set(i, true);
    return {std::move(bits), rho};
}

std::optional<Violation> validate_attack(const Attack& attack, const AdversaryBudget& budget,
                                         const CorruptionMask* mask, const TreeShape& shape) {
    const auto& f = attack.flipped;
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (f[j] >= shape.leaf_count()) return Violation{"flip index out of range", f[j]};
        if (j > 0 && f[j] <= f[j - 1]) return Violation{"flip set not sorted and distinct", f[j]};
    }
    return std::visit(
        [&](const auto& b) -> std::optional<Violation> {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, SemirandomRho>) {
                if (f.empty()) return std::nullopt;
                if (!mask) return Violation{"semirandom budget needs a mask", f.front()};
                if (mask->size() != shape.leaf_count()) return Violation{"mask length differs from leaf count", 0};
                for (auto i : f)
                    if (!mask->permitted(i)) return Violation{"flip outside permitted set", i};
            } else if constexpr (std::is_same_v<B, FractionRho>) {
                // Tolerate rounding in rho * n (e.g. 0.05 * 20).
                const double cap = b.rho * static_cast<double>(shape.leaf_count());
                const auto allowed = static_cast<std::uint64_t>(std::floor(cap + 1e-9));
                if (f.size() > allowed) return Violation{"more flips than rho * leaf_count", f[allowed]};
            } else if constexpr (std::is_same_v<B, CFlip>) {
                if (f.size() > b.c) return Violation{"more than c flips", f[b.c]};
            } else {
                if (b.k < 1 || b.k > shape.depth()) return Violation{"spread k outside 1..depth", b.k};
                const std::uint64_t width = shape.level_size(b.k);
                std::uint64_t block = std::numeric_limits<std::uint64_t>::max();
                std::uint32_t in_block = 0;
                for (auto i : f) {
                    if (i / width != block) {
                        block = i / width;
                        in_block = 0;
                    }
                    if (++in_block > b.c) return Violation{"more than c flips in a height-k block", i};
                }
            }
            return std::nullopt;
        },
        budget);
}

double Objective::operator()(const Belief& clean, const Belief& attacked) const noexcept {
    if (kind == Kind::root_shift) return std::fabs(attacked.bias() - clean.bias());
    return -root_spin * attacked.bias();
}

IncrementalBp::IncrementalBp(const SpinVector& leaves, const TreeShape& shape, double epsilon,
                             LeafChannel channel)
    : shape_(shape), epsilon_(epsilon), leaves_(leaves) {
    channel.validate();
    if (leaves.size() != shape.leaf_count()) throw ParameterError("leaf count mismatch");
    if (shape.depth() == 0) throw ParameterError("incremental BP needs depth >= 1");
    const double leaf_plus = channel.psi >= 1.0 ? -std::numeric_limits<double>::infinity()
                                                : log_ratio_from_bias(channel.psi);
    msg_plus_ = edge_message(leaf_plus, epsilon);
    lr_.assign(shape.internal_count(), 0.0);
    msg_.assign(shape.internal_count(), 0.0);
    for (NodeId v = shape.internal_count(); v-- > 0;) recompute(v);
}

void IncrementalBp::recompute(NodeId v) {
    const std::uint32_t b = shape_.arity();
    const NodeId internal = shape_.internal_count();
    const NodeId first = v * b + 1;
    double acc = 0.0;
    if (first >= internal) {
        for (std::uint32_t i = 0; i < b; ++i) acc += leaves_.is_plus(first + i - internal) ? msg_plus_ : -msg_plus_;
    } else {
        for (std::uint32_t i = 0; i < b; ++i) acc += msg_[first + i];
    }
    lr_[v] = acc;
    msg_[v] = edge_message(acc, epsilon_);
}

void IncrementalBp::toggle_leaf(std::uint64_t leaf) {
    leaves_.flip(leaf);
    NodeId v = shape_.internal_count() + leaf;
    do {
        v = (v - 1) / shape_.arity();
        recompute(v);
    } while (v != 0);
}

namespace {

// Sorted index lists compared lexicographically; bits index the permitted list.
bool lex_less(std::uint64_t a, std::uint64_t b) {
    while (true) {
        if (a == b) return false;
        if (a == 0) return true;
        if (b == 0) return false;
        const int la = std::countr_zero(a);
        const int lb = std::countr_zero(b);
        if (la != lb) return la < lb;
        a &= a - 1;
        b &= b - 1;
    }
}

constexpr double kTieTolerance = 1e-12;

bool ties(double a, double b) { return std::fabs(a - b) <= kTieTolerance * std::max(1.0, std::fabs(b)); }

void check_mask(const SpinVector& leaves, const CorruptionMask& mask) {
    if (mask.size() != leaves.size()) throw ParameterError("mask length differs from leaf count");
}

}  // namespace

ScoredAttack attack_bruteforce(const SpinVector& leaves, const CorruptionMask& mask,
                               const TreeShape& shape, double epsilon, Objective objective,
                               LeafChannel channel) {
    check_mask(leaves, mask);
    const auto permitted = mask.permitted_indices();
    if (permitted.size() > kBruteForceLimit)
        throw CapacityError("brute force needs popcount(mask) <= 22, got " + std::to_string(permitted.size()));
    IncrementalBp bp(leaves, shape, epsilon, channel);
    const Belief clean = bp.root();
    double best = objective(clean, clean);
    std::uint64_t best_set = 0;
    std::uint64_t cur = 0;
    const std::uint64_t total = std::uint64_t{1} << permitted.size();
    for (std::uint64_t g = 1; g < total; ++g) {
        const int bit = std::countr_zero(g);
        bp.toggle_leaf(permitted[bit]);
        cur ^= std::uint64_t{1} << bit;
        const double val = objective(clean, bp.root());
        if (ties(val, best)) {
            if (lex_less(cur, best_set)) best_set = cur;
        } else if (val > best) {
            best = val;
            best_set = cur;
        }
    }
    std::vector<std::uint64_t> flips;
    for (std::size_t j = 0; j < permitted.size(); ++j)
        if ((best_set >> j) & 1U) flips.push_back(permitted[j]);
    Attack a = make_attack(leaves, std::move(flips));
    const double value = objective(clean, bp_root(a.leaves, shape, epsilon, channel));
    return {std::move(a), value};
}

ScoredAttack attack_greedy(const SpinVector& leaves, const CorruptionMask& mask, const TreeShape& shape,
                           double epsilon, Objective objective, std::uint32_t max_rounds,
                           LeafChannel channel) {
    check_mask(leaves, mask);
    const auto permitted = mask.permitted_indices();
    IncrementalBp bp(leaves, shape, epsilon, channel);
    const Belief clean = bp.root();
    double current = objective(clean, clean);
    for (std::uint32_t round = 0; round < max_rounds; ++round) {
        double best = current;
        std::optional<std::uint64_t> pick;
        for (auto i : permitted) {
            bp.toggle_leaf(i);
            const double val = objective(clean, bp.root());
            bp.toggle_leaf(i);
            if (val > best && !ties(val, best)) {
                best = val;
                pick = i;
            }
        }
        if (!pick || !(best > current) || ties(best, current)) break;
        bp.toggle_leaf(*pick);
        current = objective(clean, bp.root());
    }
    std::vector<std::uint64_t> flips;
    for (auto i : permitted)
        if (bp.leaves()[i] != leaves[i]) flips.push_back(i);
    Attack a = make_attack(leaves, std::move(flips));
    return {std::move(a), current};
}

Attack attack_signpush(const SpinVector& leaves, const CorruptionMask& mask, int target) {
    check_mask(leaves, mask);
    if (target != 1 && target != -1) throw ParameterError("target sign must be +1 or -1");
    std::vector<std::uint64_t> flips;
    for (std::uint64_t i = 0; i < leaves.size(); ++i)
        if (mask.permitted(i) && leaves[i] != target) flips.push_back(i);
    return make_attack(leaves, std::move(flips));
}

Attack attack_spread_signpush(const SpinVector& leaves, const SpreadCK& budget, int target,
                              const TreeShape& shape) {
    if (target != 1 && target != -1) throw ParameterError("target sign must be +1 or -1");
    validate_budget(budget, shape);
    if (leaves.size() != shape.leaf_count()) throw ParameterError("leaf count mismatch");
    std::vector<std::uint64_t> flips;
    for (const auto& block : shape.height_k_blocks(budget.k)) {
        std::uint32_t used = 0;
        for (std::uint64_t i = block.first; i <= block.last && used < budget.c; ++i) {
            if (leaves[i] != target) {
                flips.push_back(i);
                ++used;
            }
        }
    }
    return make_attack(leaves, std::move(flips));
}

}  // namespace treecast
