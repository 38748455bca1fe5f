#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fgame/recursion.hpp"
#include "oracle/enumerate.hpp"

using namespace fgame;

namespace {

constexpr double kExact = 1e-12;

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// E[leafCount | root = x] by exhaustive enumeration.
double enumerated(const Pmf& pmf, int x, int b, int h, const std::function<AlgorithmResult(const GameTree&)>& run) {
    return oracle::expected_leaf_count(oracle::enumerate_rooted(x, pmf, b, h), b, h, pmf.n(), TreeMode::Integer, run);
}

const Pmf& skewed2() {
    static const Pmf p = Pmf::from_weights(2, std::vector<double>{0.3, 0.1, 0.25, 0.05, 0.3});
    return p;
}

}  // namespace

TEST_CASE("enumeration oracle is a probability distribution") {
    CHECK(oracle::total_probability(oracle::enumerate(Pmf::uniform(1), 2, 3)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(oracle::total_probability(oracle::enumerate(skewed2(), 2, 2)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(oracle::total_probability(oracle::enumerate_binary(0.3, 3, 2)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hand-unrolled micro example") {
    const Pmf u = Pmf::uniform(1);
    const ComplexityTable t = test_table(u, 2, 1, 1);
    CHECK(t.entry(1, t.index().test_index(1, 1)).value() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    const ComplexityTable ab = ab_table(u, 2, 1);
    CHECK(ab.entry(1, ab.index().window_index(1, 0, 1)).value() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(enumerated(u, 1, 2, 1, [](const GameTree& g) { return test(g, g.root(), 1); }) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("height 0 is 1 everywhere") {
    const Pmf u = Pmf::uniform(2);
    for (const auto& table : {test_all_table(u, 3, 0), ab_table(u, 3, 0), scout_table(u, 3, 0),
                              solve_table(BinaryParam(0.4), 3, 0)}) {
        for (const auto& e : table.layer(0)) CHECK(e.value() == 1.0);
        CHECK(table.root_marginal(0).value() == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(test_all_table(u, 3, 2).layer(3), Error);
}

TEST_CASE("TEST table matches enumeration for every state") {
    struct Case {
        Pmf pmf;
        int b, hMax;
    };
    for (const Case& c : {Case{Pmf::uniform(1), 2, 3}, Case{Pmf::uniform(1), 3, 2}, Case{skewed2(), 2, 2}}) {
        const int n = c.pmf.n();
        const ComplexityTable t = test_all_table(c.pmf, c.b, c.hMax);
        for (int h = 0; h <= c.hMax; ++h)
            for (int x = -n; x <= n; ++x)
                for (int s = -n + 1; s <= n; ++s) {
                    const double exact =
                        enumerated(c.pmf, x, c.b, h, [s](const GameTree& g) { return test(g, g.root(), s); });
                    CHECK(rel_diff(t.entry(h, t.index().test_index(x, s)).value(), exact) < kExact);
                }
    }
}

TEST_CASE("ALPHA-BETA and SCOUT tables match enumeration for every window") {
    struct Case {
        Pmf pmf;
        int b, hMax;
    };
    for (const Case& c : {Case{Pmf::uniform(1), 2, 3}, Case{Pmf::uniform(1), 3, 2}, Case{skewed2(), 2, 2}}) {
        const int n = c.pmf.n();
        const ComplexityTable ab = ab_table(c.pmf, c.b, c.hMax);
        const ComplexityTable sc = scout_table(c.pmf, c.b, c.hMax);
        for (int h = 0; h <= c.hMax; ++h)
            for (int x = -n; x <= n; ++x)
                for (int a = -n; a <= n; ++a)
                    for (int be = a + 1; be <= n; ++be) {
                        const double eAb = enumerated(c.pmf, x, c.b, h,
                                                      [a, be](const GameTree& g) { return alphabeta(g, g.root(), a, be); });
                        const double eSc =
                            enumerated(c.pmf, x, c.b, h, [a, be](const GameTree& g) { return scout(g, g.root(), a, be); });
                        CHECK(rel_diff(ab.entry(h, ab.index().window_index(x, a, be)).value(), eAb) < kExact);
                        CHECK(rel_diff(sc.entry(h, sc.index().window_index(x, a, be)).value(), eSc) < kExact);
                    }
    }
}

TEST_CASE("SOLVE table matches enumeration") {
    for (double q : {0.0, 0.3, 0.7, 1.0}) {
        for (auto [b, hMax] : {std::pair{2, 3}, std::pair{3, 2}}) {
            const ComplexityTable t = solve_table(BinaryParam(q), b, hMax);
            for (int h = 0; h <= hMax; ++h) {
                const double exact = oracle::expected_leaf_count(oracle::enumerate_binary(q, b, h), b, h, 1,
                                                                 TreeMode::Binary,
                                                                 [](const GameTree& g) { return solve(g, g.root()); });
                CHECK(rel_diff(t.root_marginal(h).value(), exact) < kExact);
            }
        }
    }
}

TEST_CASE("meta complexities match enumeration of the baselines") {
    const Pmf& p = skewed2();
    const int b = 2, hMax = 2;
    const ComplexityTable t = test_all_table(p, b, hMax);
    for (int h = 0; h <= hMax; ++h) {
        const auto trees = oracle::enumerate(p, b, h);
        const auto m = meta_complexities(t, p, h);
        auto exp = [&](const std::function<AlgorithmResult(const GameTree&)>& run) {
            return oracle::expected_leaf_count(trees, b, h, 2, TreeMode::Integer, run);
        };
        CHECK(rel_diff(m.bruteforce.value(), exp([](const GameTree& g) { return test_bruteforce(g); })) < kExact);
        CHECK(rel_diff(m.bisection.value(), exp([](const GameTree& g) { return test_bisection(g); })) < kExact);
        double sum = 0.0, worst = 0.0;
        for (int s = -1; s <= 2; ++s) {
            const double e = exp([s](const GameTree& g) { return test(g, g.root(), s); });
            sum += e;
            worst = std::max(worst, e);
        }
        CHECK(rel_diff(m.testAverage.value(), sum / 4) < kExact);
        CHECK(rel_diff(m.hardest.value(), worst) < kExact);
        CHECK(m.hardest.log() >= m.testAverage.log());
    }
    const Pmf u = Pmf::uniform(1);
    const ComplexityTable t1 = test_all_table(u, 3, 4);
    const auto m = meta_complexities(t1, u, 4);
    const TestSystem sys(u, 3);
    const double s0 = t1.marginal(4, sys.threshold_weights(0)).value();
    const double s1 = t1.marginal(4, sys.threshold_weights(1)).value();
    CHECK(rel_diff(m.bruteforce.value(), s0 + s1) < kExact);
}

TEST_CASE("single-threshold tables agree with the all-threshold table") {
    const Pmf& p = skewed2();
    const ComplexityTable all = test_all_table(p, 4, 30);
    for (int s = -1; s <= 2; ++s) {
        const ComplexityTable one = test_table(p, 4, s, 30);
        for (int h = 0; h <= 30; h += 5)
            for (int x = -2; x <= 2; ++x)
                CHECK(rel_diff(one.entry(h, one.index().test_index(x, s)).value(),
                               all.entry(h, all.index().test_index(x, s)).value()) < 1e-12);
    }
}

TEST_CASE("null-window columns: ALPHA-BETA equals TEST, SCOUT equals TEST from height 2") {
    const Pmf& p = skewed2();
    const int hMax = 40;
    const ComplexityTable t = test_all_table(p, 3, hMax);
    const ComplexityTable ab = ab_table(p, 3, hMax);
    const ComplexityTable sc = scout_table(p, 3, hMax);
    for (int h = 0; h <= hMax; ++h)
        for (int x = -2; x <= 2; ++x)
            for (int s = -1; s <= 2; ++s) {
                const double tv = t.entry(h, t.index().test_index(x, s)).log();
                CHECK(std::abs(ab.entry(h, ab.index().window_index(x, s - 1, s)).log() - tv) < 1e-12);
                if (h >= 2) CHECK(std::abs(sc.entry(h, sc.index().window_index(x, s - 1, s)).log() - tv) < 1e-12);
            }
}

TEST_CASE("level operator reproduces the system map") {
    const Pmf& p = skewed2();
    const AlphaBetaSystem ab(p, 3);
    const ScoutSystem sc(p, 3);
    const TestSystem ts(p, 3, 2);
    for (const LinearSystem* sys : std::initializer_list<const LinearSystem*>{&ab, &sc, &ts}) {
        const LevelOperator op = LevelOperator::from_system(*sys);
        const std::size_t m = sys->index().size();
        REQUIRE(op.size() == m);
        std::vector<double> in(m), a(m), b(m);
        RngStream rng(1);
        for (auto& v : in) v = rng.uniform01();
        sys->apply(in, a);
        op.apply(in, b);
        for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-13 * std::max(1.0, std::abs(a[i])));
        for (std::size_t i = 0; i < m; ++i) CHECK(op.at(i, i) >= 0.0);

        std::vector<ScaledReal> sin(m), sout(m);
        for (std::size_t i = 0; i < m; ++i) sin[i] = {in[i], 700.0 * static_cast<double>(i % 3)};
        op.apply(sin, sout);
        // scaled apply equals the plain apply when every entry shares a scale
        std::vector<ScaledReal> uin(m), uout(m);
        for (std::size_t i = 0; i < m; ++i) uin[i] = {in[i], 50.0};
        op.apply(uin, uout);
        for (std::size_t i = 0; i < m; ++i)
            if (b[i] > 0) CHECK(std::abs(uout[i].log() - (std::log(b[i]) + 50.0)) < 1e-12);
        for (const auto& e : sout) CHECK(std::isfinite(e.significand));
    }
}

TEST_CASE("large heights stay finite and nondecreasing") {
    const Pmf p = Pmf::from_weights(5, std::vector<double>{1, 8, 27, 64, 125, 216, 343, 512, 729, 1000, 1331});
    const int hMax = 5000;
    const ComplexityTable t = test_all_table(p, 10, hMax);
    const TestSystem sys(p, 10);
    for (int s = -4; s <= 5; ++s) {
        const auto w = sys.threshold_weights(s);
        double prev = -1.0;
        for (int h = 0; h <= hMax; h += 50) {
            const double l = t.marginal(h, w).log10();
            CHECK(std::isfinite(l));
            CHECK(l >= prev);
            prev = l;
        }
    }
    CHECK(t.marginal(hMax, sys.threshold_weights(5)).log10() > 1000.0);
}

TEST_CASE("SOLVE closed forms") {
    CHECK(t_coeff(1.0, 5) == 0.0);
    CHECK(t_coeff(0.0, 2) == doctest::Approx(0.5).epsilon(1e-15));
    for (int b : {2, 3, 4, 8, 16}) {
        CHECK(solve_branching(1.0, b) == doctest::Approx(std::sqrt(b)).epsilon(1e-12));
        CHECK(solve_branching(0.0, b) == doctest::Approx(saks_bound(b)).epsilon(1e-12));
    }
    CHECK(saks_bound(2) == doctest::Approx(1.686141).epsilon(1e-6));
    CHECK(saks_bound(4) == doctest::Approx((3 + std::sqrt(73.0)) / 4).epsilon(1e-14));

    for (double q : {0.0, 0.3, 0.7, 1.0}) {
        const auto c0 = solve_complexity(q, 3, 0);
        CHECK(c0.recursive.value() == doctest::Approx(1.0));
        CHECK(c0.closedFormAsPrinted == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c0.closedFormMirrored == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(solve_complexity(1.0, 3, 2).recursive.value() == doctest::Approx(3.0).epsilon(1e-15));

    for (double q : {0.2, 0.6}) {
        const int b = 4, h = 200;
        const double rh = std::exp(solve_complexity(q, b, h).recursive.log() / h);
        CHECK(std::abs(rh - solve_branching(q, b)) / solve_branching(q, b) < 1e-2);
        // successive ratio converges much faster than the h-th root
        const double ratio = std::exp(solve_complexity(q, b, h).recursive.log() - solve_complexity(q, b, h - 1).recursive.log());
        CHECK(ratio == doctest::Approx(solve_branching(q, b)).epsilon(1e-9));
    }
    // the table engine and the dedicated SOLVE recursion agree
    const ComplexityTable st = solve_table(BinaryParam(0.45), 5, 60);
    CHECK(std::abs(st.root_marginal(60).log() - solve_complexity(0.45, 5, 60).recursive.log()) < 1e-12);
}

TEST_CASE("standard-model references") {
    const double xi = (std::sqrt(5.0) - 1) / 2;
    CHECK(xi_root(2) == doctest::Approx(xi).epsilon(1e-14));
    for (int b : {2, 3, 7}) CHECK(std::abs(std::pow(xi_root(b), b) + xi_root(b) - 1) < 1e-14);
    CHECK(r_solve_standard(1 - xi, 2) == doctest::Approx(xi / (1 - xi)).epsilon(1e-12));
    CHECK(r_solve_standard(0.5, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(r_test_standard(0.0, 5) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    CHECK(r_test_standard(1.0, 5) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    CHECK(r_test_standard(1 - xi_root(3), 3) == doctest::Approx(xi_root(3) / (1 - xi_root(3))).epsilon(1e-12));
}

TEST_CASE("branching factors") {
    for (int b : {2, 3, 5}) {
        const auto est = r_test(Pmf::point_mass_max(3), b, 3);
        CHECK(est.converged);
        CHECK(est.r == doctest::Approx(saks_bound(b)).epsilon(1e-8));
        CHECK(r_test_global(Pmf::point_mass_max(3), b).r == doctest::Approx(saks_bound(b)).epsilon(1e-8));
    }
    const auto sb = branching_factor(LevelOperator::from_system(SolveSystem(BinaryParam(0.3), 4)));
    CHECK(sb.converged);
    CHECK(sb.r == doctest::Approx(solve_branching(0.3, 4)).epsilon(1e-9));

    const Pmf& p = skewed2();
    for (int b : {2, 6}) {
        const double rt = r_test_global(p, b).r;
        CHECK(rt >= std::sqrt(b) - 1e-9);
        CHECK(rt <= b + 1e-9);
        CHECK(std::abs(r_alphabeta(p, b).r - rt) < 1e-6);
        CHECK(std::abs(r_scout(p, b).r - rt) < 1e-6);
    }

    PowerIterationOptions tight;
    tight.maxIterations = 3;
    const auto capped = r_test(p, 3, 1, tight);
    CHECK_FALSE(capped.converged);
    try {
        require_converged(capped);
        FAIL("accepted an unconverged estimate");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotConverged);
    }
}

TEST_CASE("window splitting and window monotonicity of ALPHA-BETA") {
    const int hMax = 30;
    for (int n : {1, 2, 3}) {
        for (const Pmf& p : {Pmf::uniform(n), Pmf::point_mass_max(n)}) {
            for (int b : {2, 3}) {
                const ComplexityTable ab = ab_table(p, b, hMax);
                const StateIndex& idx = ab.index();
                int violations = 0, monotoneViolations = 0;
                for (int h = 0; h <= hMax; ++h)
                    for (int x = -n; x <= n; ++x)
                        for (int a = -n; a <= n; ++a)
                            for (int be = a + 1; be <= n; ++be) {
                                const double whole = ab.entry(h, idx.window_index(x, a, be)).log();
                                for (int g = a + 1; g < be; ++g) {
                                    const double split = log_sum(ab.entry(h, idx.window_index(x, a, g)),
                                                                 ab.entry(h, idx.window_index(x, g, be)));
                                    if (whole > split + 1e-9) ++violations;
                                    // narrower windows cost no more
                                    if (ab.entry(h, idx.window_index(x, a, g)).log() > whole + 1e-9) ++monotoneViolations;
                                    if (ab.entry(h, idx.window_index(x, g, be)).log() > whole + 1e-9) ++monotoneViolations;
                                }
                            }
                CHECK(violations == 0);
                CHECK(monotoneViolations == 0);
            }
        }
    }
}

TEST_CASE("operator powers reproduce the table") {
    const Pmf& p = skewed2();
    const ScoutSystem sys(p, 3);
    const LevelOperator op = LevelOperator::from_system(sys);
    const int hMax = 25;
    const ComplexityTable t = build_table(sys, hMax);
    std::vector<double> v(sys.index().size(), 1.0), next(v.size());
    for (int h = 1; h <= hMax; ++h) {
        op.apply(v, next);
        v.swap(next);
    }
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] > 0) CHECK(std::abs(t.entry(hMax, i).log() - std::log(v[i])) < 1e-9);
}

TEST_CASE("SCOUT does not grow faster than TEST") {
    for (int b : {2, 3, 5})
        for (const Pmf& p : {Pmf::uniform(2), skewed2(), Pmf::point_mass_max(2)})
            CHECK(r_scout(p, b).r <= r_test_global(p, b).r + 1e-6);
}

TEST_CASE("SOLVE growth rate at large height") {
    for (double q : {0.1, 0.5, 0.9})
        for (int b : {2, 7}) {
            const ComplexityTable t = solve_table(BinaryParam(q), b, 500);
            const double ratio = std::exp(t.root_marginal(500).log() - t.root_marginal(499).log());
            CHECK(std::abs(ratio - solve_branching(q, b)) < 1e-6);
        }
}
