#include "fgame/solvers.hpp"

#include <algorithm>
#include <limits>

namespace fgame {

namespace {

constexpr int kMinusInfinity = std::numeric_limits<int>::min();

void require_mode(const GameTree& tree, TreeMode mode, const char* algo) {
    if (tree.mode() != mode)
        throw Error(ErrorCode::WrongMode, std::string(algo) + (mode == TreeMode::Binary ? " needs a binary tree"
                                                                                       : " needs an integer tree"));
}

int solve_rec(const GameTree& t, NodeRef node, std::uint64_t& leaves) {
    if (node.height == 0) {
        ++leaves;
        return t.value(node);
    }
    int best = 0;
    for (int k = 0; k < t.b(); ++k) {
        best = std::max(best, 1 - solve_rec(t, t.child(node, k), leaves));
        if (best == 1) break;
    }
    return best;
}

int test_rec(const GameTree& t, NodeRef node, int s, std::uint64_t& leaves) {
    if (node.height == 0) {
        ++leaves;
        return t.value(node);
    }
    int best = kMinusInfinity;
    for (int k = 0; k < t.b(); ++k) {
        best = std::max(best, -test_rec(t, t.child(node, k), -s + 1, leaves));
        if (best >= s) break;
    }
    return best;
}

int alphabeta_rec(const GameTree& t, NodeRef node, int alpha, int beta, std::uint64_t& leaves) {
    if (node.height == 0) {
        ++leaves;
        return t.value(node);
    }
    int best = kMinusInfinity;
    for (int k = 0; k < t.b(); ++k) {
        best = std::max(best, -alphabeta_rec(t, t.child(node, k), -beta, -alpha, leaves));
        if (best >= beta) break;
        alpha = std::max(alpha, best);
    }
    return best;
}

int scout_rec(const GameTree& t, NodeRef node, int alpha, int beta, std::uint64_t& leaves) {
    if (node.height == 0) {
        ++leaves;
        return t.value(node);
    }
    if (alpha >= beta) return alpha;
    for (int k = 0; k < t.b(); ++k) {
        const NodeRef c = t.child(node, k);
        const int probe = -test_rec(t, c, -alpha, leaves);
        if (probe > alpha) alpha = -scout_rec(t, c, -beta, -alpha - 1, leaves);
        if (alpha >= beta) break;
    }
    return alpha;
}

}  // namespace

std::string algorithm_name(const AlgorithmKind& kind) {
    struct Namer {
        std::string operator()(const algo::Solve&) const { return "solve"; }
        std::string operator()(const algo::Test& a) const { return "test(" + std::to_string(a.s) + ")"; }
        std::string operator()(const algo::AlphaBeta& a) const {
            return "alphabeta(" + std::to_string(a.alpha) + "," + std::to_string(a.beta) + ")";
        }
        std::string operator()(const algo::Scout& a) const {
            return "scout(" + std::to_string(a.alpha) + "," + std::to_string(a.beta) + ")";
        }
        std::string operator()(const algo::TestBruteforce&) const { return "test-bruteforce"; }
        std::string operator()(const algo::TestBisection&) const { return "test-bisection"; }
        std::string operator()(const algo::TestHardest&) const { return "test-hardest"; }
    };
    return std::visit(Namer{}, kind);
}

AlgorithmResult solve(const GameTree& tree, NodeRef node) {
    require_mode(tree, TreeMode::Binary, "solve");
    AlgorithmResult r;
    r.value = solve_rec(tree, node, r.leafCount);
    return r;
}

AlgorithmResult test(const GameTree& tree, NodeRef node, int s) {
    require_mode(tree, TreeMode::Integer, "test");
    Threshold th(ValueRange(tree.n()), s);
    AlgorithmResult r;
    r.value = test_rec(tree, node, th.value(), r.leafCount);
    return r;
}

AlgorithmResult alphabeta(const GameTree& tree, NodeRef node, int alpha, int beta) {
    require_mode(tree, TreeMode::Integer, "alphabeta");
    if (alpha >= beta) throw Error(ErrorCode::InvalidWindow, "alphabeta needs alpha < beta");
    AlgorithmResult r;
    r.value = alphabeta_rec(tree, node, alpha, beta, r.leafCount);
    return r;
}

AlgorithmResult scout(const GameTree& tree, NodeRef node, int alpha, int beta) {
    require_mode(tree, TreeMode::Integer, "scout");
    AlgorithmResult r;
    r.value = scout_rec(tree, node, alpha, beta, r.leafCount);
    return r;
}

AlgorithmResult test_bruteforce(const GameTree& tree) {
    require_mode(tree, TreeMode::Integer, "test-bruteforce");
    const int n = tree.n();
    AlgorithmResult r{-n, 0};
    for (int s = -n + 1; s <= n; ++s) {
        const AlgorithmResult t = test(tree, tree.root(), s);
        r.leafCount += t.leafCount;
        if (t.value >= s) r.value = s;
    }
    return r;
}

std::vector<int> bisection_path(int n, int x) {
    std::vector<int> path;
    int lo = -n, hi = n;
    while (lo < hi) {
        const int s = lo + (hi - lo + 1) / 2;
        path.push_back(s);
        if (x >= s) lo = s;
        else hi = s - 1;
    }
    return path;
}

AlgorithmResult test_bisection(const GameTree& tree) {
    require_mode(tree, TreeMode::Integer, "test-bisection");
    int lo = -tree.n(), hi = tree.n();
    AlgorithmResult r;
    while (lo < hi) {
        const int s = lo + (hi - lo + 1) / 2;
        const AlgorithmResult t = test(tree, tree.root(), s);
        r.leafCount += t.leafCount;
        if (t.value >= s) lo = s;
        else hi = s - 1;
    }
    r.value = lo;
    return r;
}

AlgorithmResult run_algorithm(const GameTree& tree, const AlgorithmKind& kind) {
    struct Runner {
        const GameTree& t;
        AlgorithmResult operator()(const algo::Solve&) const { return solve(t, t.root()); }
        AlgorithmResult operator()(const algo::Test& a) const { return test(t, t.root(), a.s); }
        AlgorithmResult operator()(const algo::AlphaBeta& a) const { return alphabeta(t, t.root(), a.alpha, a.beta); }
        AlgorithmResult operator()(const algo::Scout& a) const { return scout(t, t.root(), a.alpha, a.beta); }
        AlgorithmResult operator()(const algo::TestBruteforce&) const { return test_bruteforce(t); }
        AlgorithmResult operator()(const algo::TestBisection&) const { return test_bisection(t); }
        AlgorithmResult operator()(const algo::TestHardest&) const {
            throw Error(ErrorCode::InvalidArgument, "test-hardest is defined on expected complexities only");
        }
    };
    return std::visit(Runner{tree}, kind);
}

}  // namespace fgame
