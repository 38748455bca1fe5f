#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fgame/core.hpp"
#include "fgame/rng.hpp"

namespace fgame {

enum class TreeMode { Integer, Binary };

struct NodeRef {
    std::size_t index = 0;  // preorder position
    int height = 0;         // distance to the leaves
};

/// Complete b-ary tree of height h with integer node values stored in preorder.
/// In binary mode values are 0/1 and negation is the complement 1 - x.
class GameTree {
public:
    /// Hand-built tree; validates shape, value range and negamax consistency.
    GameTree(int b, int h, int n, TreeMode mode, std::vector<int> values,
             std::optional<std::uint64_t> seed = std::nullopt);

    int b() const noexcept { return b_; }
    int h() const noexcept { return h_; }
    int n() const noexcept { return n_; }
    TreeMode mode() const noexcept { return mode_; }
    const std::optional<std::uint64_t>& seed() const noexcept { return seed_; }
    std::size_t node_count() const noexcept { return values_.size(); }
    const std::vector<int>& values() const noexcept { return values_; }

    NodeRef root() const noexcept { return {0, h_}; }
    int root_value() const noexcept { return values_.front(); }
    int value(NodeRef node) const { return values_.at(node.index); }
    /// k-th child (0-based) of an internal node.
    NodeRef child(NodeRef node, int k) const noexcept {
        return {node.index + 1 + static_cast<std::size_t>(k) * subtree_[static_cast<std::size_t>(node.height - 1)],
                node.height - 1};
    }
    /// Number of nodes in a subtree of the given height.
    std::size_t subtree_size(int height) const { return subtree_.at(static_cast<std::size_t>(height)); }

    /// The parent's value seen from a child: -x, or 1 - x in binary mode.
    int negate(int v) const noexcept { return mode_ == TreeMode::Binary ? 1 - v : -v; }

    friend bool operator==(const GameTree& a, const GameTree& b) {
        return a.b_ == b.b_ && a.h_ == b.h_ && a.n_ == b.n_ && a.mode_ == b.mode_ && a.values_ == b.values_;
    }

private:
    struct Unchecked {};
    GameTree(Unchecked, int b, int h, int n, TreeMode mode, std::vector<int> values,
             std::optional<std::uint64_t> seed);

    friend GameTree generate_tree(const Pmf&, int, int, std::uint64_t);
    friend GameTree generate_tree_from_root(int, const Pmf&, int, int, std::uint64_t);
    friend GameTree generate_binary_tree(const BinaryParam&, int, int, std::uint64_t);

    int b_;
    int h_;
    int n_;
    TreeMode mode_;
    std::vector<int> values_;
    std::vector<std::size_t> subtree_;
    std::optional<std::uint64_t> seed_;
};

/// (b^(h+1) - 1) / (b - 1); throws InvalidArgument beyond kMaxTreeNodes.
std::size_t tree_node_count(int b, int h);
inline constexpr std::size_t kMaxTreeNodes = std::size_t{1} << 28;

/// Children of a node with value x at height h >= 1: one uniformly placed -x,
/// the others drawn independently from truncate(pmf, -x).
std::vector<int> forward_sample(int x, int h, int b, const Pmf& pmf, RngStream& rng);
/// Binary counterpart: special child 1 - x; for x = 0 all children are 1,
/// for x = 1 the normal children are 0 with probability q.
std::vector<int> forward_sample_binary(int x, int h, int b, const BinaryParam& q, RngStream& rng);

/// Root ~ pmf, then forward sampling down to the leaves. Node i draws its
/// children from RngStream(mix_seed(seed, i)); the root value comes from
/// RngStream(mix_seed(seed, kRootStreamKey)).
GameTree generate_tree(const Pmf& pmf, int b, int h, std::uint64_t seed);
GameTree generate_binary_tree(const BinaryParam& q, int b, int h, std::uint64_t seed);
/// Same streams as generate_tree, but the root value is fixed instead of drawn.
GameTree generate_tree_from_root(int rootValue, const Pmf& pmf, int b, int h, std::uint64_t seed);
inline constexpr std::uint64_t kRootStreamKey = ~std::uint64_t{0};

/// Negamax value recomputed from the leaves, ignoring stored internal values.
int negamax_value(const GameTree& tree, NodeRef node);
/// True when every stored internal value equals its recomputed negamax value.
bool is_negamax_consistent(const GameTree& tree);

/// Text format: `fgame-tree v1`, `b <b> h <h> n <n> mode <int|bin>`, then one value per line in preorder.
void write_tree(std::ostream& out, const GameTree& tree);
void write_tree(const GameTree& tree, const std::string& path);
GameTree parse_tree(std::istream& in);
GameTree read_tree(const std::string& path);

}  // namespace fgame
