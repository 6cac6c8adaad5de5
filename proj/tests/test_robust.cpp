#include <initializer_list>
#include <doctest.h>

#include <cmath>

#include "treecast/adversary.hpp"
#include "treecast/broadcast.hpp"
#include "treecast/inference.hpp"
#include "treecast/random.hpp"
#include "treecast/robust.hpp"

using namespace treecast;

TEST_CASE("psi and block height") {
    CHECK(psi_for(1, 0.2) == doctest::Approx(std::min(0.2 / 8, std::log(1.05) / 4)));
    CHECK(default_block_height(1) == 3);
    CHECK(default_block_height(3) == 4);
    CHECK(default_block_height(4) == 5);
}

TEST_CASE("A_N with psi = 1 is plain BP") {
    const TreeShape s(3, 3);
    const SpinVector x = sample_tree({0.6, s, 2}).leaves();
    CHECK(noisy_posterior_AN(x, s, 0.6, 1.0, 9).bias() == bp_root(x, s, 0.6).bias());
}

TEST_CASE("A_N is sign equivariant for a fixed noise stream") {
    const TreeShape s(2, 4);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const SpinVector x = sample_tree({0.5, s, seed}).leaves();
        const double a = noisy_posterior_AN(x, s, 0.5, 0.3, seed).bias();
        const double b = noisy_posterior_AN(x.negated(), s, 0.5, 0.3, seed).bias();
        CHECK(b == doctest::Approx(-a).epsilon(1e-14));
    }
}

TEST_CASE("averaged A_N matches the exact noise expectation") {
    const TreeShape s(2, 2);
    const double eps = 0.5, psi = 0.2, flip = 0.5 * (1 - psi);
    const SpinVector x = SpinVector::from_string("++-+");
    double exact = 0.0;
    for (std::uint64_t m = 0; m < 16; ++m) {
        SpinVector y = x;
        double p = 1.0;
        for (std::uint64_t i = 0; i < 4; ++i) {
            if ((m >> i) & 1) {
                y.flip(i);
                p *= flip;
            } else {
                p *= 1 - flip;
            }
        }
        exact += p * bp_root(y, s, eps, {psi}).bias();
    }
    double sum = 0.0;
    const int n = 100000;
    for (int seed = 0; seed < n; ++seed) sum += noisy_posterior_AN(x, s, eps, psi, seed).bias();
    CHECK(std::fabs(sum / n - exact) < 0.01);
    CHECK(noisy_posterior_AN(x, s, eps, psi, 1, 20000).bias() == doctest::Approx(exact).epsilon(0.05));
}

TEST_CASE("model N posterior matches the oracle") {
    const TreeShape s(2, 2);
    const SpinVector x = SpinVector::from_string("+-++");
    const double p = model_N_posterior_plus(x, s, 0.4, 0.3);
    CHECK(2 * p - 1 == doctest::Approx(posterior_oracle(x, s, 0.4, {0.3}).bias()).epsilon(1e-12));
    CHECK(2 * p - 1 == doctest::Approx(bp_root(x, s, 0.4, {0.3}).bias()).epsilon(1e-12));
}

TEST_CASE("posterior ratio bounds") {
    const TreeShape s(2, 2);
    const SpinVector x = SpinVector::from_string("+--+");
    const auto none = posterior_ratio_bound_check(x, {}, s, 0.4, 0.01, 1);
    CHECK(none.ratio == 1.0);
    CHECK(none.within);
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        SpinVector y(4);
        for (int j = 0; j < 4; ++j) y.set(j, rng.spin());
        const std::uint64_t f = rng.below(4);
        const auto r = posterior_ratio_bound_check(y, std::span<const std::uint64_t>(&f, 1), s, 0.4, 0.01, 1);
        CHECK(r.ratio >= 0.98);
        CHECK(r.ratio <= std::exp(0.04));
        CHECK(r.within);
    }
    const std::uint64_t f = 0;
    const auto tiny = posterior_ratio_bound_check(x, std::span<const std::uint64_t>(&f, 1), s, 0.4, 1e-9, 1);
    CHECK(tiny.ratio == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("spread algorithm") {
    SUBCASE("one block is A_N") {
        const TreeShape s(2, 4);
        RobustParams p;
        p.c = 1;
        p.delta = 0.2;
        p.k = 4;
        p.epsilon = 0.6;
        p.shape = s;
        const SpinVector x = sample_tree({0.6, s, 4}).leaves();
        CHECK(spread_alg(x, p, 33).bias() == noisy_posterior_AN(x, s, 0.6, p.psi(), 33).bias());
    }
    SUBCASE("blocks at psi = 1 recombine to BP") {
        const TreeShape s(3, 4), block(3, 2), top(3, 2);
        const SpinVector x = sample_tree({0.6, s, 5}).leaves();
        std::vector<Belief> beliefs;
        for (std::uint64_t j = 0; j < 9; ++j) beliefs.push_back(block_posterior(x.slice(9 * j, 9), block, 0.6, 1.0, 0, j, 1));
        CHECK(bp_root_from_beliefs(beliefs, top, 0.6).bias() == doctest::Approx(bp_root(x, s, 0.6).bias()).epsilon(1e-13));
    }
    SUBCASE("block count and validation") {
        RobustParams p;
        p.k = 2;
        p.epsilon = 0.6;
        p.shape = TreeShape(3, 4);
        const auto r = spread_alg_detail(sample_tree({0.6, p.shape, 1}).leaves(), p, 0);
        CHECK(r.block_beliefs.size() == 9);
        p.k = 5;
        CHECK_THROWS(spread_alg(SpinVector(81), p, 0));
    }
}
