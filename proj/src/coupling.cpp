#include "treecast/coupling.hpp"

#include <cmath>
#include <string>

#include "treecast/errors.hpp"
#include "treecast/random.hpp"

namespace treecast {

void CouplingParams::validate() const {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw ParameterError("coupling needs 0 < epsilon < 1/2 (xi = 4eps/(1+2eps) < 1), got " +
                             std::to_string(epsilon));
}

CouplingOutcome run_marking(const CouplingParams& params, const SpinVector& x,
                            const std::function<bool(std::uint64_t)>& leaf_coin) {
    params.validate();
    const TreeShape& shape = params.shape;
    if (x.size() != shape.leaf_count()) throw ParameterError("x must have leaf_count entries");
    const LabeledTree y = sample_internal_given_leaves(params.broadcast_params(), x, 1, params.seed);
    const NodeId n = shape.node_count();
    const NodeId internal = shape.internal_count();
    const std::uint32_t b = shape.arity();
    const double xi = params.xi();

    CouplingOutcome out;
    out.input = x;
    out.y = y.spins;
    out.y_prime = SpinVector(n);
    out.marked = PackedBits(n);
    out.y_prime.set(0, -1);
    Rng coins(derive_seed(params.seed, Stream::coupling));
    auto mark_children = [&](NodeId v) {
        if (v >= internal) return;
        for (std::uint32_t i = 0; i < b; ++i) out.marked.set(v * b + 1 + i, true);
    };
    for (NodeId v = 1; v < n; ++v) {
        if (out.marked.get(v)) {
            out.y_prime.set(v, out.y[v]);
            mark_children(v);
        } else if (out.y[v] < 0) {
            out.y_prime.set(v, -1);
            out.marked.set(v, true);
            mark_children(v);
        } else {
            const bool heads = v >= internal ? leaf_coin(v - internal) : coins.uniform() < xi;
            if (heads) {
                out.y_prime.set(v, -1);
            } else {
                out.y_prime.set(v, 1);
                out.marked.set(v, true);
                mark_children(v);
            }
        }
    }
    out.output = out.y_prime.slice(internal, shape.leaf_count());
    for (std::uint64_t i = 0; i < x.size(); ++i)
        if (x[i] != out.output[i]) out.flipped.push_back(i);
    return out;
}

CouplingOutcome couple_once(const CouplingParams& params, const SpinVector& x) {
    params.validate();
    Rng coins(derive_seed(params.seed, Stream::coupling, 1));
    const double xi = params.xi();
    return run_marking(params, x, [&](std::uint64_t) { return coins.uniform() < xi; });
}

FractionOutcome fraction_adversary(const CouplingParams& params, double rho, const SpinVector& x) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ParameterError("rho must lie in [0,1]");
    CouplingOutcome c = couple_once(params, x);
    const double cap = rho * static_cast<double>(params.shape.leaf_count());
    FractionOutcome out;
    out.flip_count = c.flipped.size();
    out.coupled = static_cast<double>(out.flip_count) <= std::floor(cap + 1e-9);
    out.leaves = out.coupled ? c.output : x;
    out.coupling = std::move(c);
    return out;
}

CouplingOutcome semirandom_coupling_outcome(const CouplingParams& params, const CorruptionMask& mask,
                                            const SpinVector& x) {
    params.validate();
    if (mask.size() != params.shape.leaf_count()) throw ParameterError("mask length differs from leaf count");
    if (std::fabs(mask.density() - params.xi()) > 1e-12)
        throw ParameterError("mask density " + std::to_string(mask.density()) +
                             " differs from xi = " + std::to_string(params.xi()));
    return run_marking(params, x, [&](std::uint64_t leaf) { return mask.permitted(leaf); });
}

SpinVector semirandom_coupling_adversary(const CouplingParams& params, const CorruptionMask& mask,
                                         const SpinVector& x) {
    return semirandom_coupling_outcome(params, mask, x).output;
}

std::string check_outcome(const CouplingOutcome& out, const TreeShape& shape) {
    const NodeId internal = shape.internal_count();
    const std::uint32_t b = shape.arity();
    for (std::uint64_t i = 0; i < out.input.size(); ++i)
        if (out.y[internal + i] != out.input[i]) return "y disagrees with x at leaf " + std::to_string(i);
    if (out.y[0] != 1 || out.y_prime[0] != -1) return "root labels wrong";
    std::size_t j = 0;
    for (std::uint64_t i = 0; i < out.input.size(); ++i) {
        const bool differs = out.input[i] != out.output[i];
        const bool listed = j < out.flipped.size() && out.flipped[j] == i;
        if (differs != listed) return "flip set mismatch at leaf " + std::to_string(i);
        if (listed) ++j;
        if (!differs) continue;
        for (NodeId v = internal + i; v != 0; v = (v - 1) / b)
            if (out.marked.get(v)) return "flipped leaf " + std::to_string(i) + " has a marked ancestor";
    }
    return {};
}

}  // namespace treecast
