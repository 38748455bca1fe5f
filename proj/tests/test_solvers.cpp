#include <doctest.h>

#include <cmath>

#include "fgame/solvers.hpp"

using namespace fgame;

namespace {

GameTree int_tree(int b, int h, int n, std::vector<int> values) {
    return GameTree(b, h, n, TreeMode::Integer, std::move(values));
}

GameTree bin_tree(int b, int h, std::vector<int> values) {
    return GameTree(b, h, 1, TreeMode::Binary, std::move(values));
}

}  // namespace

TEST_CASE("solve on hand-built binary trees") {
    const GameTree leaf = bin_tree(2, 0, {1});
    CHECK(solve(leaf, leaf.root()) == AlgorithmResult{1, 1});
    const GameTree zero = bin_tree(3, 1, {0, 1, 1, 1});
    CHECK(solve(zero, zero.root()).leafCount == 3);
    CHECK(solve(zero, zero.root()).value == 0);
    const GameTree late = bin_tree(2, 1, {1, 1, 0});
    CHECK(solve(late, late.root()) == AlgorithmResult{1, 2});
    const GameTree early = bin_tree(2, 1, {1, 0, 1});
    CHECK(solve(early, early.root()) == AlgorithmResult{1, 1});
    CHECK_THROWS_AS(solve(int_tree(2, 1, 1, {1, -1, 0}), NodeRef{0, 1}), Error);
}

TEST_CASE("test on hand-built trees") {
    const GameTree leaf = int_tree(2, 0, 3, {-2});
    CHECK(test(leaf, leaf.root(), 3) == AlgorithmResult{-2, 1});
    const GameTree normalFirst = int_tree(2, 1, 1, {1, 0, -1});
    const auto a = test(normalFirst, normalFirst.root(), 1);
    CHECK(a.value >= 1);
    CHECK(a.leafCount == 2);
    const GameTree specialFirst = int_tree(2, 1, 1, {1, -1, 0});
    const auto b = test(specialFirst, specialFirst.root(), 1);
    CHECK(b.value >= 1);
    CHECK(b.leafCount == 1);
}

TEST_CASE("scout guards and the re-read cost") {
    const GameTree t = int_tree(2, 1, 1, {1, 0, -1});
    CHECK(scout(t, t.root(), 0, 0) == AlgorithmResult{0, 0});
    CHECK(scout(t, t.root(), 1, -1) == AlgorithmResult{1, 0});
    // at h = 0 the leaf is read even for an empty window
    const GameTree leaf = int_tree(2, 0, 1, {0});
    CHECK(scout(leaf, leaf.root(), 1, 1) == AlgorithmResult{0, 1});
    // both children improve alpha: TEST read + SCOUT re-read each
    const auto r = scout(t, t.root(), -1, 1);
    CHECK(r.value == 1);
    CHECK(r.leafCount == 4);
    CHECK_THROWS_AS(alphabeta(t, t.root(), 1, 1), Error);
}

TEST_CASE("baselines count runs") {
    const GameTree t = int_tree(2, 1, 1, {1, 0, -1});
    const auto bf = test_bruteforce(t);
    CHECK(bf.value == 1);
    CHECK(bf.leafCount == test(t, t.root(), 0).leafCount + test(t, t.root(), 1).leafCount);

    CHECK(bisection_path(1, -1).size() <= 2);
    CHECK(bisection_path(1, -1).front() == 0);
    CHECK(bisection_path(1, 1).front() == 0);
    for (int x = -5; x <= 5; ++x) CHECK(bisection_path(5, x).size() <= 4);
    for (int x = -5; x <= 5; ++x) {
        // every probe lies in the threshold range
        for (int s : bisection_path(5, x)) CHECK((s >= -4 && s <= 5));
    }
}

TEST_CASE("names") {
    CHECK(algorithm_name(algo::Test{2}) == "test(2)");
    CHECK(algorithm_name(algo::AlphaBeta{-1, 1}) == "alphabeta(-1,1)");
    CHECK(algorithm_name(algo::Solve{}) == "solve");
    const GameTree t = int_tree(2, 1, 1, {1, 0, -1});
    CHECK_THROWS_AS(run_algorithm(t, algo::TestHardest{}), Error);
}

TEST_CASE("random trees: values agree with negamax") {
    for (int n : {1, 2, 5}) {
        const Pmf u = Pmf::uniform(n);
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            const GameTree t = generate_tree(u, 3, 3, seed + 1000 * static_cast<std::uint64_t>(n));
            const int v = t.root_value();
            CHECK(alphabeta(t, t.root(), -n, n).value == v);
            CHECK(scout(t, t.root(), -n, n).value == v);
            CHECK(test_bruteforce(t).value == v);
            CHECK(test_bisection(t).value == v);
            for (int s = -n + 1; s <= n; ++s) CHECK((test(t, t.root(), s).value >= s) == (v >= s));
        }
    }
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const GameTree t = generate_binary_tree(BinaryParam(0.35), 3, 4, seed);
        CHECK(solve(t, t.root()).value == t.root_value());
    }
}

TEST_CASE("random trees: null-window alpha-beta is test") {
    const Pmf p = Pmf::from_weights(2, std::vector<double>{1, 2, 3, 4, 5});
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const GameTree t = generate_tree(p, 3, 4, seed);
        for (int s = -1; s <= 2; ++s) {
            const auto ab = alphabeta(t, t.root(), s - 1, s);
            const auto ts = test(t, t.root(), s);
            CHECK(ab.leafCount == ts.leafCount);
            CHECK((ab.value >= s) == (ts.value >= s));
        }
    }
}

TEST_CASE("random trees: fail-soft bounds of alpha-beta") {
    const Pmf u = Pmf::uniform(3);
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const GameTree t = generate_tree(u, 2, 5, seed);
        const int v = t.root_value();
        for (int a = -3; a <= 3; ++a)
            for (int b = a + 1; b <= 3; ++b) {
                const int g = alphabeta(t, t.root(), a, b).value;
                if (g <= a) CHECK(v <= g);
                else if (g >= b) CHECK(v >= g);
                else CHECK(v == g);
            }
    }
}

TEST_CASE("random trees: null-window SCOUT matches TEST from height 2") {
    const Pmf u = Pmf::uniform(2);
    for (int h = 2; h <= 4; ++h)
        for (std::uint64_t seed = 0; seed < 300; ++seed) {
            const GameTree t = generate_tree(u, 3, h, seed);
            for (int s = -1; s <= 2; ++s) {
                const auto sc = scout(t, t.root(), s - 1, s);
                const auto ts = test(t, t.root(), s);
                CHECK(sc.leafCount == ts.leafCount);
                CHECK((sc.value >= s) == (ts.value >= s));
            }
        }
}
