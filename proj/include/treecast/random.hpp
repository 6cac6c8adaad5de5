#pragma once

// Seeding and the per-stream generator.
//
// Every random draw in the library comes from an Rng constructed from a
// derived seed: derive_seed(parent, tag, index) hashes the three words with
// the SplitMix64 finalizer. Streams are therefore addressed by
// (master seed, purpose tag, index path) and never depend on which worker
// happens to run a trial.

#include <cstdint>
#include <limits>
#include <string_view>

namespace treecast {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Purpose tags. Values are part of the output format: changing one changes
// every downstream sample.
enum class Stream : std::uint64_t {
    tree = 0x7472,        // broadcast sampling
    root = 0x726f,        // uniform root spin
    resample = 0x7273,    // conditional resampling of internal spins
    mask = 0x6d61,        // semirandom permission coins
    noise = 0x6e6f,       // BSC noise injection
    coupling = 0x6370,    // xi-coins of the marking process
    trial = 0x7472696c,   // per-trial seed in the harness
    instance = 0x696e,    // random instance generation in experiments
    pool = 0x706f,        // pooled recursive sampler
};

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag,
                                    std::uint64_t index = 0) noexcept {
    return mix64(mix64(parent ^ mix64(tag)) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, Stream tag,
                                    std::uint64_t index = 0) noexcept {
    return derive_seed(parent, static_cast<std::uint64_t>(tag), index);
}

// FNV-1a, used to fold experiment ids into seeds.
constexpr std::uint64_t hash_name(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// xoshiro256** seeded through SplitMix64. Satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept {
        std::uint64_t z = seed;
        for (auto& w : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            w = mix64(z - 0x9e3779b97f4a7c15ULL);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    int spin() noexcept { return ((*this)() >> 63) ? 1 : -1; }

    // Uniform integer in [0, n), n > 0 (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t n) noexcept {
        __uint128_t m = static_cast<__uint128_t>((*this)()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<__uint128_t>((*this)()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

}  // namespace treecast
