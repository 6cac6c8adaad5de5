#pragma once

#include <cstdint>
#include <vector>

namespace treecast {

using NodeId = std::uint64_t;

// Closed range of leaf indices (0-based within the leaf level).
struct LeafRange {
    std::uint64_t first = 0;
    std::uint64_t last = 0;

    std::uint64_t size() const noexcept { return last - first + 1; }
    bool contains(std::uint64_t leaf) const noexcept { return leaf >= first && leaf <= last; }
    friend bool operator==(const LeafRange&, const LeafRange&) = default;
};

// Complete b-ary tree of depth t with breadth-first numbering: the root is 0
// and the children of node v are b*v+1 .. b*v+b. Leaves of any subtree are
// contiguous.
class TreeShape {
public:
    TreeShape(std::uint32_t arity, std::uint32_t depth);

    std::uint32_t arity() const noexcept { return arity_; }
    std::uint32_t depth() const noexcept { return depth_; }
    std::uint64_t leaf_count() const noexcept { return powers_[depth_]; }
    std::uint64_t node_count() const noexcept { return starts_[depth_ + 1]; }
    std::uint64_t internal_count() const noexcept { return starts_[depth_]; }

    // arity^level for 0 <= level <= depth.
    std::uint64_t level_size(std::uint32_t level) const;
    // Id of the first node at `level` (level may equal depth+1, giving node_count).
    NodeId level_start(std::uint32_t level) const;

    NodeId node_index(std::uint32_t level, std::uint64_t offset) const;
    NodeId child(NodeId id, std::uint32_t i) const;
    std::vector<NodeId> children_of(NodeId id) const;
    NodeId parent(NodeId id) const;
    std::uint32_t level_of(NodeId id) const;
    std::uint64_t offset_of(NodeId id) const { return id - level_start(level_of(id)); }
    bool is_leaf(NodeId id) const { return level_of(id) == depth_; }

    NodeId leaf_node(std::uint64_t leaf) const;
    std::uint64_t leaf_of(NodeId id) const;

    LeafRange subtree_leaf_range(NodeId id) const;
    std::vector<LeafRange> height_k_blocks(std::uint32_t k) const;

    friend bool operator==(const TreeShape& a, const TreeShape& b) noexcept {
        return a.arity_ == b.arity_ && a.depth_ == b.depth_;
    }

private:
    void check_node(NodeId id) const;

    std::uint32_t arity_;
    std::uint32_t depth_;
    std::vector<std::uint64_t> powers_;  // arity^l, l = 0..depth
    std::vector<std::uint64_t> starts_;  // first id of level l, l = 0..depth+1
};

}  // namespace treecast
