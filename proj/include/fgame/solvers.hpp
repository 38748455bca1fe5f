#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "fgame/forward_model.hpp"

namespace fgame {

/// Returned value plus the number of leaf inspections, re-reads included.
struct AlgorithmResult {
    int value = 0;
    std::uint64_t leafCount = 0;

    friend bool operator==(const AlgorithmResult&, const AlgorithmResult&) = default;
};

namespace algo {
struct Solve {};
struct Test {
    int s;
};
struct AlphaBeta {
    int alpha;
    int beta;
};
struct Scout {
    int alpha;
    int beta;
};
struct TestBruteforce {};
struct TestBisection {};
struct TestHardest {};
}  // namespace algo

using AlgorithmKind = std::variant<algo::Solve, algo::Test, algo::AlphaBeta, algo::Scout, algo::TestBruteforce,
                                   algo::TestBisection, algo::TestHardest>;

std::string algorithm_name(const AlgorithmKind& kind);

// Binary trees only (WrongMode otherwise). Scans children left to right and
// stops at the first child whose complement is 1.
AlgorithmResult solve(const GameTree& tree, NodeRef node);

// Integer trees only. The certificate v satisfies v >= s iff the node value is >= s.
AlgorithmResult test(const GameTree& tree, NodeRef node, int s);

// Fail-soft alpha-beta in negamax form. Requires alpha < beta (InvalidWindow).
AlgorithmResult alphabeta(const GameTree& tree, NodeRef node, int alpha, int beta);

// SCOUT with the guard order h = 0 first, then alpha >= beta (returns alpha at cost 0).
AlgorithmResult scout(const GameTree& tree, NodeRef node, int alpha, int beta);

// TEST for every threshold s in {-n+1, ..., n}; value is the largest s that passes, or -n.
AlgorithmResult test_bruteforce(const GameTree& tree);

// Bisection over [lo, hi] = [-n, n] with probe s = lo + ceil((hi - lo) / 2).
AlgorithmResult test_bisection(const GameTree& tree);

/// Thresholds probed by the bisection baseline when the root value is x.
std::vector<int> bisection_path(int n, int x);

/// Dispatches any kind whose per-tree behaviour is defined (all except TestHardest).
AlgorithmResult run_algorithm(const GameTree& tree, const AlgorithmKind& kind);

}  // namespace fgame
