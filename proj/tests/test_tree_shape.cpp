#include <initializer_list>
#include <doctest.h>

#include "treecast/errors.hpp"
#include "treecast/tree_shape.hpp"

using namespace treecast;

TEST_CASE("breadth-first ids") {
    const TreeShape s(3, 2);
    CHECK(s.node_index(0, 0) == 0);
    CHECK(s.node_index(1, 2) == 3);
    CHECK(s.children_of(0) == std::vector<NodeId>{1, 2, 3});
    CHECK(s.leaf_count() == 9);
    CHECK(s.node_count() == 13);
    CHECK(s.internal_count() == 4);
    for (NodeId v = 1; v < s.node_count(); ++v) {
        const NodeId p = s.parent(v);
        const auto kids = s.children_of(p);
        CHECK(std::find(kids.begin(), kids.end(), v) != kids.end());
    }
    CHECK(s.level_of(12) == 2);
    CHECK(s.offset_of(12) == 8);
    CHECK(s.leaf_of(s.leaf_node(5)) == 5);
}

TEST_CASE("subtree leaf ranges") {
    const TreeShape s(2, 3);
    CHECK(s.subtree_leaf_range(0) == LeafRange{0, 7});
    CHECK(s.subtree_leaf_range(s.leaf_node(3)) == LeafRange{3, 3});
    CHECK(s.subtree_leaf_range(s.node_index(1, 1)) == LeafRange{4, 7});
}

TEST_CASE("height-k blocks") {
    const auto a = TreeShape(2, 3).height_k_blocks(1);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == LeafRange{2 * i, 2 * i + 1});
    const auto b = TreeShape(3, 2).height_k_blocks(2);
    REQUIRE(b.size() == 1);
    CHECK(b[0].size() == 9);
    const auto c = TreeShape(2, 4).height_k_blocks(2);
    REQUIRE(c.size() == 4);
    CHECK(c[3] == LeafRange{12, 15});
    CHECK_THROWS_AS(TreeShape(2, 4).height_k_blocks(5), RangeError);
    CHECK_THROWS_AS(TreeShape(2, 4).height_k_blocks(0), RangeError);
}

TEST_CASE("shape errors") {
    CHECK_THROWS(TreeShape(0, 2));
    CHECK_THROWS(TreeShape(2, 63));
    const TreeShape s(2, 2);
    CHECK_THROWS_AS(s.parent(0), RangeError);
    CHECK_THROWS_AS(s.children_of(s.leaf_node(0)), RangeError);
    CHECK_THROWS_AS(s.node_index(3, 0), RangeError);
}
