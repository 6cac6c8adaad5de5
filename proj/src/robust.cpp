#include "treecast/robust.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "treecast/errors.hpp"
#include "treecast/random.hpp"

namespace treecast {

double psi_for(std::uint32_t c, double delta) {
    if (c < 1) throw ParameterError("psi needs c >= 1");
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    const double cc = static_cast<double>(c);
    const double psi = std::min(delta / (8.0 * cc), std::log1p(delta / 4.0) / (4.0 * cc));
    if (psi > 1.0) throw ParameterError("psi exceeds 1; delta too large");
    return psi;
}

std::uint32_t default_block_height(std::uint32_t c) {
    return static_cast<std::uint32_t>(std::bit_width(c)) + 2;  // ceil(log2(c+1)) + 2
}

void RobustParams::validate() const {
    const double p = psi();
    const double cc = static_cast<double>(c);
    if (4.0 * p * cc > std::log1p(delta / 4.0) * (1.0 + 1e-15) || 2.0 * p * cc > delta / 4.0 * (1.0 + 1e-15))
        throw ParameterError("psi violates its defining bounds");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in [0,1)");
    if (averaging < 1) throw ParameterError("averaging must be >= 1");
    const std::uint32_t kk = block_height();
    if (kk < 1 || kk > shape.depth())
        throw ParameterError("block height " + std::to_string(kk) + " needs 1 <= k <= depth " +
                             std::to_string(shape.depth()));
}

Belief block_posterior(const SpinVector& block_leaves, const TreeShape& block_shape, double epsilon,
                       double psi, std::uint64_t seed, std::uint64_t block, std::uint32_t averaging) {
    if (!(psi > 0.0 && psi <= 1.0)) throw ParameterError("psi must lie in (0,1]");
    if (averaging < 1) throw ParameterError("averaging must be >= 1");
    if (psi >= 1.0) return bp_root(block_leaves, block_shape, epsilon);
    const double flip = 0.5 * (1.0 - psi);
    double sum = 0.0;
    Belief last;
    for (std::uint32_t r = 0; r < averaging; ++r) {
        Rng rng(derive_seed(seed, Stream::noise, block * averaging + r));
        SpinVector noisy = block_leaves;
        for (std::uint64_t i = 0; i < noisy.size(); ++i)
            if (rng.uniform() < flip) noisy.flip(i);
        last = bp_root(noisy, block_shape, epsilon, LeafChannel{psi});
        sum += last.bias();
    }
    if (averaging == 1) return last;
    return Belief::from_bias(std::clamp(sum / averaging, -1.0, 1.0));
}

Belief noisy_posterior_AN(const SpinVector& leaves, const TreeShape& shape, double epsilon, double psi,
                          std::uint64_t seed, std::uint32_t averaging) {
    return block_posterior(leaves, shape, epsilon, psi, seed, 0, averaging);
}

namespace {

// Unnormalized P(x, root = +1) and P(x, root = -1) under model N.
std::pair<double, double> model_N_weights(const SpinVector& leaves, const TreeShape& shape, double eps,
                                          double psi) {
    if (leaves.size() != shape.leaf_count()) throw ParameterError("leaf count mismatch");
    const NodeId internal = shape.internal_count();
    if (shape.leaf_count() > 16 || internal > 20)
        throw CapacityError("model-N enumeration needs <= 16 leaves and <= 20 internal nodes");
    const NodeId n = shape.node_count();
    const std::uint32_t b = shape.arity();
    auto edge = [eps](int a, int c) { return 0.5 * (1.0 + eps * a * c); };
    auto obs = [psi](int truth, int seen) { return 0.5 * (1.0 + psi * truth * seen); };
    std::vector<int> s(internal);
    double wp = 0.0;
    double wm = 0.0;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << internal); ++m) {
        for (NodeId v = 0; v < internal; ++v) s[v] = ((m >> v) & 1U) ? 1 : -1;
        double w = 1.0;
        for (NodeId v = 1; v < internal; ++v) w *= edge(s[(v - 1) / b], s[v]);
        for (NodeId v = internal; v < n; ++v) {
            const int p = s[(v - 1) / b];
            const int seen = leaves[v - internal];
            w *= edge(p, 1) * obs(1, seen) + edge(p, -1) * obs(-1, seen);
        }
        (s[0] > 0 ? wp : wm) += w;
    }
    return {wp, wm};
}

}  // namespace

double model_N_posterior_plus(const SpinVector& leaves, const TreeShape& shape, double epsilon, double psi) {
    if (!(psi > 0.0 && psi <= 1.0)) throw ParameterError("psi must lie in (0,1]");
    auto [wp, wm] = model_N_weights(leaves, shape, epsilon, psi);
    return wp / (wp + wm);
}

RatioCheck posterior_ratio_bound_check(const SpinVector& leaves, std::span<const std::uint64_t> flips,
                                       const TreeShape& shape, double epsilon, double psi, std::uint32_t c) {
    if (flips.size() > c) throw ParameterError("more flips than c");
    SpinVector moved = leaves;
    for (auto i : flips) {
        if (i >= leaves.size()) throw RangeError("flip index out of range");
        moved.flip(i);
    }
    RatioCheck r;
    r.ratio = model_N_posterior_plus(moved, shape, epsilon, psi) / model_N_posterior_plus(leaves, shape, epsilon, psi);
    r.lower = 1.0 - 2.0 * psi * c;
    r.upper = std::exp(4.0 * psi * c);
    r.within = r.ratio >= r.lower && r.ratio <= r.upper;
    return r;
}

SpreadResult spread_alg_detail(const SpinVector& corrupted, const RobustParams& params, std::uint64_t seed) {
    params.validate();
    const TreeShape& shape = params.shape;
    if (corrupted.size() != shape.leaf_count()) throw ParameterError("leaf count mismatch");
    const std::uint32_t k = params.block_height();
    const TreeShape block_shape(shape.arity(), k);
    const TreeShape top(shape.arity(), shape.depth() - k);
    const double psi = params.psi();
    SpreadResult out;
    const auto blocks = shape.height_k_blocks(k);
    out.block_beliefs.reserve(blocks.size());
    for (std::uint64_t j = 0; j < blocks.size(); ++j) {
        out.block_beliefs.push_back(block_posterior(corrupted.slice(blocks[j].first, blocks[j].size()),
                                                    block_shape, params.epsilon, psi, seed, j,
                                                    params.averaging));
    }
    out.root = bp_root_from_beliefs(out.block_beliefs, top, params.epsilon);
    return out;
}

Belief spread_alg(const SpinVector& corrupted, const RobustParams& params, std::uint64_t seed) {
    return spread_alg_detail(corrupted, params, seed).root;
}

}  // namespace treecast
