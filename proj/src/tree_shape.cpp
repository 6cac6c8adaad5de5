#include "treecast/tree_shape.hpp"

#include <string>

#include "treecast/errors.hpp"

namespace treecast {

namespace {
constexpr std::uint64_t kMaxNodes = std::uint64_t{1} << 62;
}

TreeShape::TreeShape(std::uint32_t arity, std::uint32_t depth) : arity_(arity), depth_(depth) {
    if (arity < 1) throw ParameterError("tree arity must be >= 1");
    powers_.reserve(depth + 1);
    starts_.reserve(depth + 2);
    std::uint64_t p = 1;
    std::uint64_t total = 0;
    for (std::uint32_t l = 0; l <= depth; ++l) {
        powers_.push_back(p);
        starts_.push_back(total);
        total += p;
        if (total > kMaxNodes) throw CapacityError("tree too large to index");
        if (l < depth) {
            if (p > kMaxNodes / arity) throw CapacityError("tree too large to index");
            p *= arity;
        }
    }
    starts_.push_back(total);
}

std::uint64_t TreeShape::level_size(std::uint32_t level) const {
    if (level > depth_) throw RangeError("level " + std::to_string(level) + " beyond depth");
    return powers_[level];
}

NodeId TreeShape::level_start(std::uint32_t level) const {
    if (level > depth_ + 1) throw RangeError("level " + std::to_string(level) + " beyond depth");
    return starts_[level];
}

NodeId TreeShape::node_index(std::uint32_t level, std::uint64_t offset) const {
    if (level > depth_) throw RangeError("level " + std::to_string(level) + " beyond depth");
    if (offset >= powers_[level])
        throw RangeError("offset " + std::to_string(offset) + " out of range at level " +
                         std::to_string(level));
    return starts_[level] + offset;
}

void TreeShape::check_node(NodeId id) const {
    if (id >= node_count()) throw RangeError("node id " + std::to_string(id) + " out of range");
}

NodeId TreeShape::child(NodeId id, std::uint32_t i) const {
    check_node(id);
    if (is_leaf(id)) throw RangeError("leaf " + std::to_string(id) + " has no children");
    if (i >= arity_) throw RangeError("child index out of range");
    return id * arity_ + 1 + i;
}

std::vector<NodeId> TreeShape::children_of(NodeId id) const {
    std::vector<NodeId> out;
    out.reserve(arity_);
    for (std::uint32_t i = 0; i < arity_; ++i) out.push_back(child(id, i));
    return out;
}

NodeId TreeShape::parent(NodeId id) const {
    check_node(id);
    if (id == 0) throw RangeError("root has no parent");
    return (id - 1) / arity_;
}

std::uint32_t TreeShape::level_of(NodeId id) const {
    check_node(id);
    std::uint32_t l = 0;
    while (starts_[l + 1] <= id) ++l;
    return l;
}

NodeId TreeShape::leaf_node(std::uint64_t leaf) const {
    if (leaf >= leaf_count()) throw RangeError("leaf " + std::to_string(leaf) + " out of range");
    return starts_[depth_] + leaf;
}

std::uint64_t TreeShape::leaf_of(NodeId id) const {
    check_node(id);
    if (id < starts_[depth_]) throw RangeError("node " + std::to_string(id) + " is not a leaf");
    return id - starts_[depth_];
}

LeafRange TreeShape::subtree_leaf_range(NodeId id) const {
    const std::uint32_t l = level_of(id);
    const std::uint64_t width = powers_[depth_ - l];
    const std::uint64_t off = id - starts_[l];
    return {off * width, (off + 1) * width - 1};
}

std::vector<LeafRange> TreeShape::height_k_blocks(std::uint32_t k) const {
    if (k < 1 || k > depth_)
        throw RangeError("block height " + std::to_string(k) + " outside 1.." + std::to_string(depth_));
    const std::uint64_t count = powers_[depth_ - k];
    const std::uint64_t width = powers_[k];
    std::vector<LeafRange> out;
    out.reserve(count);
    for (std::uint64_t j = 0; j < count; ++j) out.push_back({j * width, (j + 1) * width - 1});
    return out;
}

}  // namespace treecast
