#include "treecast/harness/pair_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "treecast/errors.hpp"
#include "treecast/harness/parallel.hpp"
#include "treecast/logratio.hpp"

namespace treecast::harness {

namespace {

std::vector<double> binomial_cdf(std::uint32_t n, double p) {
    std::vector<double> pmf(n + 1);
    for (std::uint32_t k = 0; k <= n; ++k) {
        const double lg = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        const double a = k ? k * std::log(p) : 0.0;
        const double b = (n - k) ? (n - k) * std::log1p(-p) : 0.0;
        pmf[k] = (p == 0.0) ? (k == 0 ? 1.0 : 0.0) : (p == 1.0 ? (k == n ? 1.0 : 0.0) : std::exp(lg + a + b));
    }
    std::vector<double> cdf(n + 1);
    double acc = 0.0;
    for (std::uint32_t k = 0; k <= n; ++k) cdf[k] = (acc += pmf[k]);
    for (auto& c : cdf) c /= acc;
    cdf[n] = 1.0;
    return cdf;
}

std::uint32_t draw(const std::vector<double>& cdf, Rng& rng) {
    const double u = rng.uniform();
    return static_cast<std::uint32_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

}  // namespace

CollapsedPairSampler::CollapsedPairSampler(const PairSamplerParams& params) : p_(params) {
    if (p_.arity < 1 || p_.depth < 1) throw ParameterError("pair sampler needs arity >= 1 and depth >= 1");
    if (!(p_.epsilon >= 0.0 && p_.epsilon < 1.0)) throw ParameterError("epsilon must lie in [0,1)");
    if (!(p_.rho >= 0.0 && p_.rho < 1.0)) throw ParameterError("rho must lie in [0,1)");
    const std::uint32_t b = p_.arity;
    const double eps = p_.epsilon;
    saturation_ = std::log1p(eps) - std::log1p(-eps);
    k_cdf_[0] = binomial_cdf(b, 0.5 * (1.0 - eps));
    k_cdf_[1] = binomial_cdf(b, 0.5 * (1.0 + eps));
    m_cdf_.resize(b + 1);
    msg_.resize(b + 1);
    dmsg_.resize(b + 1);
    for (std::uint32_t k = 0; k <= b; ++k) {
        m_cdf_[k] = binomial_cdf(k, p_.rho);
        const BeliefPair base = level1_pair(k, 0);
        msg_[k] = edge_message(base.log_ratio, eps);
        dmsg_[k].resize(k + 1);
        for (std::uint32_t m = 0; m <= k; ++m) {
            const BeliefPair pr = level1_pair(k, m);
            dmsg_[k][m] = edge_message_delta(pr.log_ratio, pr.delta, eps);
        }
    }
}

BeliefPair CollapsedPairSampler::level1_pair(std::uint32_t k, std::uint32_t m) const {
    // Each +1 leaf contributes -saturation to the log-ratio, each -1 leaf +saturation.
    const double b = p_.arity;
    return {(b - 2.0 * k) * saturation_, 2.0 * m * saturation_};
}

CollapsedPairSampler::Message CollapsedPairSampler::sample_level1(int spin, Rng& rng) const {
    const std::uint32_t k = draw(k_cdf_[spin > 0], rng);
    const std::uint32_t m = draw(m_cdf_[k], rng);
    return {msg_[k], dmsg_[k][m]};
}

BeliefPair CollapsedPairSampler::sample_node(std::uint32_t height, int spin, Rng& rng) const {
    if (height == 1) {
        const std::uint32_t k = draw(k_cdf_[spin > 0], rng);
        const std::uint32_t m = draw(m_cdf_[k], rng);
        return level1_pair(k, m);
    }
    const double agree = 0.5 * (1.0 + p_.epsilon);
    double acc = 0.0;
    double dacc = 0.0;
    for (std::uint32_t i = 0; i < p_.arity; ++i) {
        const int child = rng.uniform() < agree ? spin : -spin;
        if (height == 2) {
            const Message mm = sample_level1(child, rng);
            acc += mm.msg;
            dacc += mm.dmsg;
        } else {
            const BeliefPair c = sample_node(height - 1, child, rng);
            acc += edge_message(c.log_ratio, p_.epsilon);
            dacc += edge_message_delta(c.log_ratio, c.delta, p_.epsilon);
        }
    }
    return {acc, dacc};
}

BeliefPair CollapsedPairSampler::sample_root(Rng& rng) const { return sample_node(p_.depth, 1, rng); }

std::vector<BeliefPair> pooled_root_samples(const PairSamplerParams& params, std::uint64_t trials,
                                            std::uint64_t pool_size, std::uint64_t seed, unsigned workers) {
    const CollapsedPairSampler base(params);
    if (params.depth <= 1) {
        return run_indexed<BeliefPair>(trials, workers, [&](std::uint64_t i) {
            Rng rng(derive_seed(seed, Stream::trial, i));
            return base.sample_root(rng);
        });
    }
    if (pool_size < 1) throw ParameterError("pool size must be >= 1");
    using Message = CollapsedPairSampler::Message;
    const double eps = params.epsilon;
    const double agree = 0.5 * (1.0 + eps);
    const std::uint32_t b = params.arity;
    // pool[s]: messages of height-h nodes with spin s (0: -1, 1: +1).
    // Without an attack the law for spin -1 is the mirror of spin +1;
    // mirroring the pools keeps their means exactly antisymmetric, which
    // stops a finite-pool offset from compounding level over level.
    const bool mirror = params.rho == 0.0;
    std::vector<Message> pool[2];
    auto mirror_pools = [&] {
        pool[0].resize(pool[1].size());
        for (std::size_t i = 0; i < pool[1].size(); ++i) pool[0][i] = Message{-pool[1][i].msg, 0.0};
    };
    for (int s = mirror ? 1 : 0; s < 2; ++s) {
        pool[s] = run_indexed<Message>(pool_size, workers, [&](std::uint64_t i) {
            Rng rng(derive_seed(seed, Stream::pool, (std::uint64_t{1} << 40) * s + i));
            return base.sample_level1(s ? 1 : -1, rng);
        });
    }
    if (mirror) mirror_pools();
    auto combine = [&](int spin, Rng& rng) {
        BeliefPair acc{0.0, 0.0};
        for (std::uint32_t c = 0; c < b; ++c) {
            const int child = rng.uniform() < agree ? spin : -spin;
            const Message& m = pool[child > 0][rng.below(pool_size)];
            acc.log_ratio += m.msg;
            acc.delta += m.dmsg;
        }
        return acc;
    };
    for (std::uint32_t h = 2; h < params.depth; ++h) {
        std::vector<Message> next[2];
        for (int s = mirror ? 1 : 0; s < 2; ++s) {
            next[s] = run_indexed<Message>(pool_size, workers, [&](std::uint64_t i) {
                Rng rng(derive_seed(seed, Stream::pool, (std::uint64_t{h} << 41) + (std::uint64_t{1} << 40) * s + i));
                const BeliefPair p = combine(s ? 1 : -1, rng);
                return Message{edge_message(p.log_ratio, eps), edge_message_delta(p.log_ratio, p.delta, eps)};
            });
        }
        pool[1] = std::move(next[1]);
        if (mirror) mirror_pools();
        else pool[0] = std::move(next[0]);
    }
    return run_indexed<BeliefPair>(trials, workers, [&](std::uint64_t i) {
        Rng rng(derive_seed(seed, Stream::trial, i));
        return combine(1, rng);
    });
}

}  // namespace treecast::harness
