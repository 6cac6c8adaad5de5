#include <initializer_list>
#include <doctest.h>

#include <cmath>
#include <vector>

#include "treecast/broadcast.hpp"
#include "treecast/errors.hpp"
#include "treecast/inference.hpp"
#include "treecast/random.hpp"

using namespace treecast;

namespace {

std::vector<Belief> beliefs(std::initializer_list<double> xs) {
    std::vector<Belief> out;
    for (double x : xs) out.push_back(Belief::from_bias(x));
    return out;
}

SpinVector random_leaves(std::uint64_t n, std::uint64_t seed) {
    Rng rng(seed);
    SpinVector v(n);
    for (std::uint64_t i = 0; i < n; ++i) v.set(i, rng.spin());
    return v;
}

}  // namespace

TEST_CASE("bp_combine hand values") {
    CHECK(bp_combine(beliefs({0.0, 0.0, 0.0}), 0.7).bias() == 0.0);
    for (double eps : {0.1, 0.55, 0.9})
        for (double x : {-0.8, 0.2, 1.0}) CHECK(bp_combine(beliefs({x}), eps).bias() == doctest::Approx(eps * x).epsilon(1e-14));
    CHECK(bp_combine(beliefs({1.0, 1.0}), 0.5).bias() == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("bp_root on one level") {
    const TreeShape s(3, 1);
    CHECK(bp_root(SpinVector::from_string("++-"), s, 0.3).bias() == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(posterior_oracle(SpinVector::from_string("++-"), s, 0.3).bias() == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(bp_root(SpinVector::from_string("--+"), s, 0.3).bias() == doctest::Approx(-0.3).epsilon(1e-15));
}

TEST_CASE("sign symmetry") {
    const TreeShape s(3, 4);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SpinVector x = random_leaves(s.leaf_count(), seed);
        for (double psi : {1.0, 0.6}) {
            const double a = bp_root(x, s, 0.45, {psi}).bias();
            const double b = bp_root(x.negated(), s, 0.45, {psi}).bias();
            CHECK(a == -b);
        }
    }
}

TEST_CASE("bp_root agrees with the enumeration oracle") {
    const TreeShape s(2, 3);
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const SpinVector x = random_leaves(8, seed);
        for (double psi : {1.0, 0.35})
            worst = std::max(worst, std::fabs(bp_root(x, s, 0.4, {psi}).bias() - posterior_oracle(x, s, 0.4, {psi}).bias()));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("posterior oracle regression values") {
    // Level-1 likelihood ratios give P(+)/P(-) = 0.4375/0.1875 = 7/3.
    CHECK(posterior_oracle(SpinVector::from_string("+++-"), TreeShape(2, 2), 0.5).bias() ==
          doctest::Approx(0.4).epsilon(1e-15));
    for (const char* x : {"++++", "+-+-", "----"})
        CHECK(posterior_oracle(SpinVector::from_string(x), TreeShape(2, 2), 0.0).bias() == 0.0);
    CHECK_THROWS_AS(posterior_oracle(SpinVector(27), TreeShape(3, 3), 0.3), CapacityError);
}

TEST_CASE("bp_all_levels") {
    const TreeShape s(3, 3);
    const SpinVector x = random_leaves(27, 4);
    const auto all = bp_all_levels(x, s, 0.6, {0.7});
    for (std::uint64_t i = 0; i < 27; ++i) CHECK(all[s.leaf_node(i)].bias() == doctest::Approx(0.7 * x[i]).epsilon(1e-15));
    CHECK(all[0].bias() == bp_root(x, s, 0.6, {0.7}).bias());

    // All-plus leaves: every level is the scalar recursion x -> combine(x,...,x).
    const auto plus = bp_all_levels(SpinVector(27, 1), s, 0.6);
    double level = 1.0;
    for (std::uint32_t r = 1; r <= 3; ++r) {
        level = bp_combine(beliefs({level, level, level}), 0.6).bias();
        const NodeId first = s.level_start(3 - r);
        for (NodeId v = first; v < first + s.level_size(3 - r); ++v)
            CHECK(plus[v].bias() == doctest::Approx(level).epsilon(1e-14));
    }
}

TEST_CASE("tv_from_biases") {
    using B = Belief;
    CHECK(tv_from_biases(B::from_bias(0.8), B::from_bias(0.8)) == 0.0);
    CHECK(tv_from_biases(B::from_bias(1.0), B::from_bias(-1.0)) == 1.0);
    CHECK(tv_from_biases(B::from_bias(0.5), B::from_bias(0.1)) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(B::from_bias(1.5), ParameterError);
}

TEST_CASE("paired propagation matches separate runs") {
    const TreeShape s(4, 4);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SpinVector x = random_leaves(s.leaf_count(), seed);
        SpinVector z = x;
        for (std::uint64_t i = 0; i < z.size(); i += 3 + seed) z.flip(i);
        for (double psi : {1.0, 0.8}) {
            const auto pairs = bp_paired_all_levels(x, z, s, 0.5, {psi});
            const auto cx = bp_all_levels(x, s, 0.5, {psi});
            const auto cz = bp_all_levels(z, s, 0.5, {psi});
            for (NodeId v = 0; v < s.node_count(); ++v) {
                CHECK(pairs[v].clean().bias() == doctest::Approx(cx[v].bias()).epsilon(1e-13));
                CHECK(pairs[v].attacked().bias() == doctest::Approx(cz[v].bias()).epsilon(1e-12));
                const double gap = std::fabs(cx[v].bias() - cz[v].bias());
                CHECK(std::fabs(pairs[v].damage() - gap) <= 1e-9 * gap + 1e-15);
            }
        }
    }
}

TEST_CASE("paired propagation keeps tiny damages") {
    // At b=64 the root is nearly certain; the shift from one flip is far
    // below double spacing near 1, yet it stays positive and consistent.
    const TreeShape s(64, 2);
    SpinVector x(s.leaf_count(), 1);
    SpinVector z = x;
    z.flip(0);
    const auto p = bp_paired_all_levels(x, z, s, 0.5);
    CHECK(p[0].damage() > 0.0);
    CHECK(p[0].damage() < 1e-20);
    CHECK(p[1].damage() > p[0].damage());
}
