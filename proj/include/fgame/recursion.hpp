#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fgame/core.hpp"
#include "fgame/solvers.hpp"

namespace fgame {

/// One height step of an average-case complexity recursion.
///
/// Every system here is linear and homogeneous in the previous layer: the
/// within-level recursion over the number c of remaining children (and the
/// auxiliary J quantities, conditioned on the special child having been seen)
/// is unrolled inside apply(), so a layer at height h is a linear image of the
/// layer at height h-1 restricted to full child counts c = b. The layer at
/// height 0 is the all-ones vector.
class LinearSystem {
public:
    virtual ~LinearSystem() = default;

    virtual const StateIndex& index() const noexcept = 0;
    /// out = level map applied to prev; both sized index().size().
    virtual void apply(std::span<const double> prev, std::span<double> out) const = 0;
    /// Weights of the root marginal E_X[I^{X,...}(h)] over the state vector.
    virtual std::vector<double> root_weights() const = 0;
    virtual AlgorithmKind algorithm() const = 0;
    virtual int b() const noexcept = 0;
};

/// TEST over a threshold set closed under s -> -s+1.
class TestSystem final : public LinearSystem {
public:
    /// Thresholds {s, -s+1}.
    TestSystem(const Pmf& pmf, int b, int s);
    /// Every threshold in {-n+1, ..., n}.
    TestSystem(const Pmf& pmf, int b);

    const StateIndex& index() const noexcept override { return index_; }
    void apply(std::span<const double> prev, std::span<double> out) const override;
    std::vector<double> root_weights() const override;
    AlgorithmKind algorithm() const override { return algo::Test{s_}; }
    int b() const noexcept override { return b_; }

    /// Root-marginal weights for an arbitrary threshold present in the index.
    std::vector<double> threshold_weights(int s) const;
    const Pmf& pmf() const noexcept { return pmf_; }

private:
    Pmf pmf_;
    int b_;
    int s_;
    StateIndex index_;
};

/// ALPHA-BETA over all active windows (x, alpha, beta).
class AlphaBetaSystem final : public LinearSystem {
public:
    AlphaBetaSystem(const Pmf& pmf, int b);

    const StateIndex& index() const noexcept override { return index_; }
    void apply(std::span<const double> prev, std::span<double> out) const override;
    std::vector<double> root_weights() const override;
    AlgorithmKind algorithm() const override;
    int b() const noexcept override { return b_; }

    std::vector<double> window_weights(Window w) const;

private:
    Pmf pmf_;
    int b_;
    StateIndex index_;
};

/// SCOUT joined with the TEST recursion it calls. The state vector holds every
/// TEST state, every active window, and one degenerate-window state whose
/// value is 1 at height 0 and 0 above (SCOUT checks h = 0 before alpha >= beta).
class ScoutSystem final : public LinearSystem {
public:
    ScoutSystem(const Pmf& pmf, int b);

    const StateIndex& index() const noexcept override { return index_; }
    void apply(std::span<const double> prev, std::span<double> out) const override;
    std::vector<double> root_weights() const override;
    AlgorithmKind algorithm() const override;
    int b() const noexcept override { return b_; }

    std::vector<double> window_weights(Window w) const;
    std::vector<double> threshold_weights(int s) const;

private:
    Pmf pmf_;
    int b_;
    StateIndex index_;
    TestSystem test_;
};

/// Binary SOLVE: I0(h) = b I1(h-1), I1(h) = I0(h-1) + t(q,b) I1(h-1).
class SolveSystem final : public LinearSystem {
public:
    SolveSystem(const BinaryParam& q, int b);

    const StateIndex& index() const noexcept override { return index_; }
    void apply(std::span<const double> prev, std::span<double> out) const override;
    std::vector<double> root_weights() const override;
    AlgorithmKind algorithm() const override { return algo::Solve{}; }
    int b() const noexcept override { return b_; }

private:
    double q_;
    int b_;
    double t_;
    StateIndex index_;
};

/// One height of a table: every state carries its own scale, so blocks of
/// states growing at different rates never underflow against each other.
using Layer = std::vector<ScaledReal>;

/// sum_i w_i * v_i over entries with w_i > 0.
ScaledReal weighted_sum(std::span<const ScaledReal> values, std::span<const double> weights);

/// Per-height layers of conditioned expected complexities.
class ComplexityTable {
public:
    ComplexityTable(AlgorithmKind algorithm, StateIndex index, std::vector<double> rootWeights,
                    std::vector<Layer> layers);

    const AlgorithmKind& algorithm() const noexcept { return algorithm_; }
    const StateIndex& index() const noexcept { return index_; }
    int h_max() const noexcept { return static_cast<int>(layers_.size()) - 1; }
    const Layer& layer(int h) const;

    ScaledReal entry(int h, std::size_t stateIndex) const { return layer(h).at(stateIndex); }
    ScaledReal entry(int h, const State& st) const;
    /// E_X over the default root states (threshold s for TEST, full window otherwise).
    ScaledReal root_marginal(int h) const { return marginal(h, rootWeights_); }
    ScaledReal marginal(int h, std::span<const double> weights) const { return weighted_sum(layer(h), weights); }

private:
    AlgorithmKind algorithm_;
    StateIndex index_;
    std::vector<double> rootWeights_;
    std::vector<Layer> layers_;
};

/// Iterates the level operator from the all-ones layer.
ComplexityTable build_table(const LinearSystem& system, int hMax);

ComplexityTable test_table(const Pmf& pmf, int b, int s, int hMax);
ComplexityTable test_all_table(const Pmf& pmf, int b, int hMax);
ComplexityTable ab_table(const Pmf& pmf, int b, int hMax);
/// Joint table: TEST states for every threshold plus the SCOUT windows.
ComplexityTable scout_table(const Pmf& pmf, int b, int hMax);
ComplexityTable solve_table(const BinaryParam& q, int b, int hMax);

ScaledReal root_marginal(const ComplexityTable& table, int h);

struct MetaComplexities {
    ScaledReal bruteforce;
    ScaledReal bisection;
    ScaledReal hardest;
    ScaledReal testAverage;
    int hardestThreshold = 0;
};

/// TEST-based baselines from a table holding every threshold (test_all_table or scout_table).
MetaComplexities meta_complexities(const ComplexityTable& testTables, const Pmf& pmf, int h);

/// log(a + b) for two scaled reals.
double log_sum(const ScaledReal& a, const ScaledReal& b);

/// Nonnegative sparse matrix (CSR) mapping the height h-1 layer to height h.
class LevelOperator {
public:
    static LevelOperator from_system(const LinearSystem& system);

    std::size_t size() const noexcept { return rowStart_.empty() ? 0 : rowStart_.size() - 1; }
    std::size_t nonzeros() const noexcept { return values_.size(); }
    void apply(std::span<const double> in, std::span<double> out) const;
    /// Same map on per-entry scaled values.
    void apply(std::span<const ScaledReal> in, std::span<ScaledReal> out) const;
    double at(std::size_t row, std::size_t col) const;
    const std::vector<double>& root_weights() const noexcept { return rootWeights_; }

private:
    std::vector<std::size_t> rowStart_;
    std::vector<std::size_t> cols_;
    std::vector<double> values_;
    std::vector<double> rootWeights_;
};

struct BranchingFactorEstimate {
    double r = 0.0;
    int iterations = 0;
    double residual = 0.0;  // last relative change of the growth estimate
    bool converged = false;
};

struct PowerIterationOptions {
    double tolerance = 1e-10;
    int stableSteps = 10;
    int maxIterations = 100000;
};

/// Growth rate of weights . (op^k ones), estimated as the geometric mean of two
/// consecutive step ratios (neutralizes period-2 oscillation).
BranchingFactorEstimate branching_factor(const LevelOperator& op, std::span<const double> weights,
                                         const PowerIterationOptions& opts = {});
BranchingFactorEstimate branching_factor(const LevelOperator& op, const PowerIterationOptions& opts = {});
/// Throws NotConverged when the estimate did not settle.
const BranchingFactorEstimate& require_converged(const BranchingFactorEstimate& est);

BranchingFactorEstimate r_test(const Pmf& pmf, int b, int s, const PowerIterationOptions& opts = {});
/// max_s r_TEST(s).
BranchingFactorEstimate r_test_global(const Pmf& pmf, int b, const PowerIterationOptions& opts = {});
BranchingFactorEstimate r_alphabeta(const Pmf& pmf, int b, const PowerIterationOptions& opts = {});
BranchingFactorEstimate r_scout(const Pmf& pmf, int b, const PowerIterationOptions& opts = {});

// Binary SOLVE closed forms.

/// Expected number of value-1 children SOLVE reads before the first 0-child.
double t_coeff(double q, int b);
double solve_branching(double q, int b);
/// Worst-case randomized bound (b - 1 + sqrt(b^2 + 14b + 1)) / 4.
double saks_bound(int b);

enum class ClosedFormVariant { AsPrinted, Mirrored, Both, Neither };
std::string to_string(ClosedFormVariant v);

struct SolveComplexity {
    ScaledReal recursive;
    double closedFormAsPrinted = 0.0;  // q-weight on the I1-shaped term
    double closedFormMirrored = 0.0;   // q-weight on the I0-shaped term
};

SolveComplexity solve_complexity(double q, int b, int h);
/// Which closed-form variant reproduces the recursion for every h <= hMax at relative tolerance tol.
ClosedFormVariant solve_closed_form_match(double q, int b, int hMax, double tol);

// Standard (i.i.d. leaves) model references.

/// Positive root of x^b + x - 1 = 0, by bisection on (0, 1).
double xi_root(int b);
double r_solve_standard(double q0, int b);
double r_test_standard(double cdfAtThreshold, int b);

}  // namespace fgame
