#include <initializer_list>
#include <doctest.h>

#include "treecast/errors.hpp"
#include "treecast/spin_vector.hpp"

using namespace treecast;

TEST_CASE("string round trip and flips") {
    SpinVector v = SpinVector::from_string("++-+-");
    CHECK(v.size() == 5);
    CHECK(v.to_string() == "++-+-");
    CHECK(v.count_plus() == 3);
    v.flip(2);
    CHECK(v[2] == 1);
    CHECK(v.negated().to_string() == "----+");
    CHECK(v.slice(1, 3).to_string() == "+++");
    CHECK_THROWS(SpinVector::from_string("+x-"));
    CHECK_THROWS_AS(v.at(5), RangeError);
}

TEST_CASE("equality ignores the node offset") {
    const SpinVector a = SpinVector::from_string("+-+", 7);
    CHECK(a == SpinVector::from_string("+-+"));
    CHECK(a.first_node() == 7);
}

TEST_CASE("packing across word boundaries") {
    SpinVector v(130, -1);
    v.set(0, 1);
    v.set(64, 1);
    v.set(129, 1);
    CHECK(v.count_plus() == 3);
    const auto spins = v.unpack();
    CHECK(spins[64] == 1);
    CHECK(spins[63] == -1);
    CHECK(SpinVector::from_packed(v.packed()) == v);
}

TEST_CASE("corruption mask") {
    const auto m = CorruptionMask::from_string("1001", 0.5);
    CHECK(m.popcount() == 2);
    CHECK(m.permitted_indices() == std::vector<std::uint64_t>{0, 3});
    CHECK(m.to_string() == "1001");
    CHECK(CorruptionMask::none(4).popcount() == 0);
    CHECK(CorruptionMask::all(4).popcount() == 4);
    CHECK_THROWS(CorruptionMask::from_string("10", 1.5));
}
