#include "fgame/forward_model.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace fgame {

namespace {

void check_shape(int b, int h) {
    if (b < 2) throw Error(ErrorCode::InvalidArgument, "branching degree must be >= 2");
    if (h < 0) throw Error(ErrorCode::InvalidHeight, "height must be >= 0");
}

std::vector<std::size_t> subtree_sizes(int b, int h) {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(h) + 1);
    std::size_t size = 1;
    for (int k = 0; k <= h; ++k) {
        sizes[static_cast<std::size_t>(k)] = size;
        size = size * static_cast<std::size_t>(b) + 1;
    }
    return sizes;
}

/// Inverse-CDF sampler for truncate(pmf, -x), one table per parent value x.
class TruncatedSampler {
public:
    explicit TruncatedSampler(const Pmf& pmf) : range_(pmf.range()) {
        const int n = range_.n();
        cdf_.resize(range_.size());
        for (int x = -n; x <= n; ++x) {
            const Pmf t = truncate(pmf, -x);
            auto& c = cdf_[range_.offset(x)];
            double acc = 0.0;
            for (int v = -x; v <= n; ++v) {
                acc += t(v);
                c.push_back(acc);
            }
        }
    }

    int sample(int x, RngStream& rng) const {
        const auto& c = cdf_[range_.offset(x)];
        const double u = rng.uniform01();
        for (std::size_t k = 0; k < c.size(); ++k)
            if (u < c[k]) return -x + static_cast<int>(k);
        // u landed in the rounding gap above the last cumulative value.
        for (std::size_t k = c.size(); k-- > 0;)
            if (k == 0 || c[k] > c[k - 1]) return -x + static_cast<int>(k);
        return range_.max();
    }

    int sample_root(const Pmf& pmf, RngStream& rng) const {
        (void)pmf;
        // truncate(pmf, -n) is pmf itself.
        return sample(range_.max(), rng);
    }

private:
    ValueRange range_;
    std::vector<std::vector<double>> cdf_;
};

void sample_children(int x, int b, const TruncatedSampler& sampler, RngStream& rng, int* out) {
    const auto special = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(b)));
    for (int k = 0; k < b; ++k) out[k] = (k == special) ? -x : sampler.sample(x, rng);
}

void sample_children_binary(int x, int b, double q, RngStream& rng, int* out) {
    const auto special = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(b)));
    for (int k = 0; k < b; ++k) {
        if (k == special) out[k] = 1 - x;
        else if (x == 0) out[k] = 1;
        else out[k] = rng.uniform01() < q ? 0 : 1;
    }
}

}  // namespace

std::size_t tree_node_count(int b, int h) {
    check_shape(b, h);
    std::size_t size = 1;
    for (int k = 0; k < h; ++k) {
        if (size > (kMaxTreeNodes - 1) / static_cast<std::size_t>(b))
            throw Error(ErrorCode::InvalidArgument, "tree too large to materialize");
        size = size * static_cast<std::size_t>(b) + 1;
    }
    return size;
}

GameTree::GameTree(Unchecked, int b, int h, int n, TreeMode mode, std::vector<int> values,
                   std::optional<std::uint64_t> seed)
    : b_(b), h_(h), n_(n), mode_(mode), values_(std::move(values)), subtree_(subtree_sizes(b, h)), seed_(seed) {}

GameTree::GameTree(int b, int h, int n, TreeMode mode, std::vector<int> values, std::optional<std::uint64_t> seed)
    : GameTree(Unchecked{}, b, h, n, mode, std::move(values), seed) {
    const std::size_t expected = tree_node_count(b, h);
    if (values_.size() != expected)
        throw Error(ErrorCode::StructureError, "expected " + std::to_string(expected) + " nodes for b=" +
                                                   std::to_string(b) + ", h=" + std::to_string(h) + ", got " +
                                                   std::to_string(values_.size()));
    const int lo = mode == TreeMode::Binary ? 0 : -n;
    const int hi = mode == TreeMode::Binary ? 1 : n;
    if (mode == TreeMode::Binary && n != 1) throw Error(ErrorCode::InvalidArgument, "binary trees use n = 1");
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] < lo || values_[i] > hi)
            throw Error(ErrorCode::StructureError, "node " + std::to_string(i) + " value out of range");
    if (!is_negamax_consistent(*this)) throw Error(ErrorCode::StructureError, "values violate negamax consistency");
}

std::vector<int> forward_sample(int x, int h, int b, const Pmf& pmf, RngStream& rng) {
    if (h < 1) throw Error(ErrorCode::InvalidHeight, "leaves have no children");
    check_shape(b, h);
    if (!pmf.range().contains(x)) throw Error(ErrorCode::InvalidArgument, "node value outside value range");
    TruncatedSampler sampler(pmf);
    std::vector<int> out(static_cast<std::size_t>(b));
    sample_children(x, b, sampler, rng, out.data());
    return out;
}

std::vector<int> forward_sample_binary(int x, int h, int b, const BinaryParam& q, RngStream& rng) {
    if (h < 1) throw Error(ErrorCode::InvalidHeight, "leaves have no children");
    check_shape(b, h);
    if (x != 0 && x != 1) throw Error(ErrorCode::InvalidArgument, "binary node value must be 0 or 1");
    std::vector<int> out(static_cast<std::size_t>(b));
    sample_children_binary(x, b, q.q(), rng, out.data());
    return out;
}

namespace {

std::vector<int> grow_values(int rootValue, const TruncatedSampler& sampler, int b, int h, std::uint64_t seed) {
    std::vector<int> values(tree_node_count(b, h));
    const std::vector<std::size_t> subtree = subtree_sizes(b, h);
    values[0] = rootValue;
    std::vector<int> kids(static_cast<std::size_t>(b));
    // Preorder walk; node i is sampled from its own stream, so visiting order is irrelevant.
    std::vector<NodeRef> stack{{0, h}};
    while (!stack.empty()) {
        const NodeRef node = stack.back();
        stack.pop_back();
        if (node.height == 0) continue;
        RngStream rng(mix_seed(seed, node.index));
        sample_children(values[node.index], b, sampler, rng, kids.data());
        const std::size_t step = subtree[static_cast<std::size_t>(node.height - 1)];
        for (int k = b - 1; k >= 0; --k) {
            const NodeRef c{node.index + 1 + static_cast<std::size_t>(k) * step, node.height - 1};
            values[c.index] = kids[static_cast<std::size_t>(k)];
            stack.push_back(c);
        }
    }
    return values;
}

}  // namespace

GameTree generate_tree(const Pmf& pmf, int b, int h, std::uint64_t seed) {
    check_shape(b, h);
    const TruncatedSampler sampler(pmf);
    RngStream rootRng(mix_seed(seed, kRootStreamKey));
    const int root = sampler.sample_root(pmf, rootRng);
    return GameTree(GameTree::Unchecked{}, b, h, pmf.n(), TreeMode::Integer, grow_values(root, sampler, b, h, seed),
                    seed);
}

GameTree generate_tree_from_root(int rootValue, const Pmf& pmf, int b, int h, std::uint64_t seed) {
    check_shape(b, h);
    if (!pmf.range().contains(rootValue)) throw Error(ErrorCode::InvalidArgument, "root value outside value range");
    const TruncatedSampler sampler(pmf);
    return GameTree(GameTree::Unchecked{}, b, h, pmf.n(), TreeMode::Integer,
                    grow_values(rootValue, sampler, b, h, seed), seed);
}

GameTree generate_binary_tree(const BinaryParam& q, int b, int h, std::uint64_t seed) {
    const std::size_t count = tree_node_count(b, h);
    std::vector<int> values(count);
    RngStream rootRng(mix_seed(seed, kRootStreamKey));
    values[0] = rootRng.uniform01() < q.q() ? 0 : 1;

    GameTree tree(GameTree::Unchecked{}, b, h, 1, TreeMode::Binary, std::vector<int>{}, seed);
    std::vector<int> kids(static_cast<std::size_t>(b));
    std::vector<NodeRef> stack{tree.root()};
    while (!stack.empty()) {
        const NodeRef node = stack.back();
        stack.pop_back();
        if (node.height == 0) continue;
        RngStream rng(mix_seed(seed, node.index));
        sample_children_binary(values[node.index], b, q.q(), rng, kids.data());
        for (int k = b - 1; k >= 0; --k) {
            const NodeRef c = tree.child(node, k);
            values[c.index] = kids[static_cast<std::size_t>(k)];
            stack.push_back(c);
        }
    }
    return GameTree(GameTree::Unchecked{}, b, h, 1, TreeMode::Binary, std::move(values), seed);
}

int negamax_value(const GameTree& tree, NodeRef node) {
    if (node.height == 0) return tree.value(node);
    int best = std::numeric_limits<int>::min();
    for (int k = 0; k < tree.b(); ++k) best = std::max(best, tree.negate(negamax_value(tree, tree.child(node, k))));
    return best;
}

namespace {

// Returns the recomputed value, or nullopt on the first inconsistency.
std::optional<int> check_consistent(const GameTree& tree, NodeRef node) {
    if (node.height == 0) return tree.value(node);
    int best = std::numeric_limits<int>::min();
    for (int k = 0; k < tree.b(); ++k) {
        const auto v = check_consistent(tree, tree.child(node, k));
        if (!v) return std::nullopt;
        best = std::max(best, tree.negate(*v));
    }
    if (best != tree.value(node)) return std::nullopt;
    return best;
}

}  // namespace

bool is_negamax_consistent(const GameTree& tree) { return check_consistent(tree, tree.root()).has_value(); }

void write_tree(std::ostream& out, const GameTree& tree) {
    out << "fgame-tree v1\n";
    out << "b " << tree.b() << " h " << tree.h() << " n " << tree.n() << " mode "
        << (tree.mode() == TreeMode::Binary ? "bin" : "int") << '\n';
    for (int v : tree.values()) out << v << '\n';
}

void write_tree(const GameTree& tree, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
    write_tree(out, tree);
}

namespace {

[[noreturn]] void tree_parse_fail(int line, const std::string& msg) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

bool parse_int_strict(const std::string& text, int& out) {
    if (text.empty()) return false;
    std::size_t pos = 0;
    try {
        const long v = std::stol(text, &pos, 10);
        if (pos != text.size() || v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
            return false;
        out = static_cast<int>(v);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

GameTree parse_tree(std::istream& in) {
    std::string line;
    int lineNo = 0;
    if (!std::getline(in, line)) tree_parse_fail(1, "empty input");
    ++lineNo;
    if (line != "fgame-tree v1") tree_parse_fail(lineNo, "expected `fgame-tree v1`");

    if (!std::getline(in, line)) tree_parse_fail(2, "missing header line");
    ++lineNo;
    std::istringstream header(line);
    std::string kb, kh, kn, km, mode, extra;
    int b = 0, h = 0, n = 0;
    if (!(header >> kb >> b >> kh >> h >> kn >> n >> km >> mode) || kb != "b" || kh != "h" || kn != "n" ||
        km != "mode")
        tree_parse_fail(lineNo, "expected `b <b> h <h> n <n> mode <int|bin>`");
    if (header >> extra) tree_parse_fail(lineNo, "trailing tokens");
    TreeMode tm;
    if (mode == "int") tm = TreeMode::Integer;
    else if (mode == "bin") tm = TreeMode::Binary;
    else tree_parse_fail(lineNo, "mode must be int or bin");
    if (b < 2 || h < 0 || n < 1) tree_parse_fail(lineNo, "invalid b, h or n");

    std::vector<int> values;
    while (std::getline(in, line)) {
        ++lineNo;
        int v = 0;
        if (!parse_int_strict(line, v)) tree_parse_fail(lineNo, "expected one integer value");
        values.push_back(v);
    }
    return GameTree(b, h, n, tm, std::move(values));
}

GameTree read_tree(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    return parse_tree(in);
}

}  // namespace fgame
