#include "fgame/recursion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace fgame {

namespace {

void check_b(int b) {
    if (b < 2) throw Error(ErrorCode::InvalidArgument, "branching degree must be >= 2");
}

/// cond[x][X' + n] = P(X' | X' >= -x).
std::vector<std::vector<double>> conditional_table(const Pmf& pmf) {
    const ValueRange& r = pmf.range();
    std::vector<std::vector<double>> out(r.size());
    for (int x = r.min(); x <= r.max(); ++x) {
        const Pmf t = truncate(pmf, -x);
        out[r.offset(x)].assign(t.probabilities().begin(), t.probabilities().end());
    }
    return out;
}

/// The (I, J) recursion over remaining children c = 1..b shared by TEST,
/// ALPHA-BETA and SCOUT. For one (x, beta) it runs over every alpha in
/// [-n, beta - 1] at once, since continuations only raise alpha.
///
///   J_c[a] = E[a] + sum_{X': -X' < beta} q(X') J_{c-1}[max(a, -X')]
///   I_c[a] = (spec[a] + [x < beta] J_{c-1}[max(a, x)]) / c
///          + (c-1)/c (E[a] + sum_{X': -X' < beta} q(X') I_{c-1}[max(a, -X')])
///
/// E[a] is the expected child cost of a normal child and spec[a] the cost of
/// the special child, both already evaluated at height h-1. For TEST the
/// same shape appears with alpha = beta - 1 fixed.
class WindowRecursion {
public:
    WindowRecursion(int n, int b) : n_(n), b_(b) {
        const std::size_t w = static_cast<std::size_t>(2 * n + 1);
        I_.resize(w);
        J_.resize(w);
        In_.resize(w);
        Jn_.resize(w);
    }

    /// Arrays indexed by alpha + n for alpha in [-n, beta-1]; result written to result[alpha + n].
    void run(int x, int beta, std::span<const double> cond, std::span<const double> E, std::span<const double> spec,
             std::span<double> result) {
        const int n = n_;
        const int aCount = beta + n;  // alphas -n .. beta-1
        std::fill_n(I_.begin(), aCount, 0.0);
        std::fill_n(J_.begin(), aCount, 0.0);
        // Normal children that do not cut: -X' < beta  <=>  X' > -beta, and X' >= -x.
        const int lowX = std::max(-x, -beta + 1);
        for (int c = 1; c <= b_; ++c) {
            const double inv = 1.0 / c;
            const double rest = static_cast<double>(c - 1) / c;
            for (int ai = 0; ai < aCount; ++ai) {
                const int a = ai - n;
                double sumI = 0.0, sumJ = 0.0;
                for (int xp = lowX; xp <= n; ++xp) {
                    const double q = cond[static_cast<std::size_t>(xp + n)];
                    if (q == 0.0) continue;
                    const int na = std::max(a, -xp) + n;
                    sumI += q * I_[static_cast<std::size_t>(na)];
                    sumJ += q * J_[static_cast<std::size_t>(na)];
                }
                const double e = E[static_cast<std::size_t>(ai)];
                Jn_[static_cast<std::size_t>(ai)] = e + sumJ;
                const double specCont = x < beta ? J_[static_cast<std::size_t>(std::max(a, x) + n)] : 0.0;
                In_[static_cast<std::size_t>(ai)] =
                    inv * (spec[static_cast<std::size_t>(ai)] + specCont) + rest * (e + sumI);
            }
            std::swap(I_, In_);
            std::swap(J_, Jn_);
        }
        std::copy_n(I_.begin(), aCount, result.begin());
    }

private:
    int n_;
    int b_;
    std::vector<double> I_, J_, In_, Jn_;
};

/// TEST step for a single state (x, s).
double test_state_step(int x, int s, int b, int n, std::span<const double> cond, double special,
                       double expectedChild) {
    // P(-X' < s | X' >= -x)
    double cont = 0.0;
    for (int xp = std::max(-x, -s + 1); xp <= n; ++xp) cont += cond[static_cast<std::size_t>(xp + n)];
    double I = 0.0, J = 0.0;
    for (int c = 1; c <= b; ++c) {
        const double inv = 1.0 / c;
        const double rest = static_cast<double>(c - 1) / c;
        const double In = inv * (special + (x < s ? J : 0.0)) + rest * (expectedChild + cont * I);
        const double Jn = expectedChild + cont * J;
        I = In;
        J = Jn;
    }
    return I;
}

}  // namespace

// ---------------------------------------------------------------------------
// TEST

TestSystem::TestSystem(const Pmf& pmf, int b, int s)
    : pmf_(pmf), b_(b), s_(s), index_(StateIndex::test_pair(pmf.range(), s)) {
    check_b(b);
}

TestSystem::TestSystem(const Pmf& pmf, int b)
    : pmf_(pmf), b_(b), s_(pmf.n()), index_(StateIndex::test_all(pmf.range())) {
    check_b(b);
}

void TestSystem::apply(std::span<const double> prev, std::span<double> out) const {
    const int n = pmf_.n();
    const auto cond = conditional_table(pmf_);
    for (std::size_t i = 0; i < index_.size(); ++i) {
        const State& st = index_.state(i);
        const int x = st.x, s = st.s, cs = -s + 1;
        const auto& q = cond[pmf_.range().offset(x)];
        double expected = 0.0;
        for (int xp = -x; xp <= n; ++xp) {
            const double w = q[static_cast<std::size_t>(xp + n)];
            if (w != 0.0) expected += w * prev[index_.test_index(xp, cs)];
        }
        out[i] = test_state_step(x, s, b_, n, q, prev[index_.test_index(-x, cs)], expected);
    }
}

std::vector<double> TestSystem::threshold_weights(int s) const {
    std::vector<double> w(index_.size(), 0.0);
    for (int x = -pmf_.n(); x <= pmf_.n(); ++x) w[index_.test_index(x, s)] = pmf_(x);
    return w;
}

std::vector<double> TestSystem::root_weights() const { return threshold_weights(s_); }

// ---------------------------------------------------------------------------
// ALPHA-BETA

AlphaBetaSystem::AlphaBetaSystem(const Pmf& pmf, int b)
    : pmf_(pmf), b_(b), index_(StateIndex::windows(pmf.range())) {
    check_b(b);
}

AlgorithmKind AlphaBetaSystem::algorithm() const { return algo::AlphaBeta{-pmf_.n(), pmf_.n()}; }

void AlphaBetaSystem::apply(std::span<const double> prev, std::span<double> out) const {
    const int n = pmf_.n();
    const auto cond = conditional_table(pmf_);
    const std::size_t w = static_cast<std::size_t>(2 * n + 1);
    std::vector<double> E(w), spec(w), result(w);
    WindowRecursion rec(n, b_);
    for (int x = -n; x <= n; ++x) {
        const auto& q = cond[pmf_.range().offset(x)];
        for (int beta = -n + 1; beta <= n; ++beta) {
            for (int a = -n; a < beta; ++a) {
                const auto ai = static_cast<std::size_t>(a + n);
                double e = 0.0;
                for (int xp = -x; xp <= n; ++xp) {
                    const double p = q[static_cast<std::size_t>(xp + n)];
                    if (p != 0.0) e += p * prev[index_.window_index(xp, -beta, -a)];
                }
                E[ai] = e;
                spec[ai] = prev[index_.window_index(-x, -beta, -a)];
            }
            rec.run(x, beta, q, E, spec, result);
            for (int a = -n; a < beta; ++a)
                out[index_.window_index(x, a, beta)] = result[static_cast<std::size_t>(a + n)];
        }
    }
}

std::vector<double> AlphaBetaSystem::window_weights(Window win) const {
    std::vector<double> wts(index_.size(), 0.0);
    for (int x = -pmf_.n(); x <= pmf_.n(); ++x) wts[index_.window_index(x, win.alpha, win.beta)] = pmf_(x);
    return wts;
}

std::vector<double> AlphaBetaSystem::root_weights() const { return window_weights(full_window(pmf_.range())); }

// ---------------------------------------------------------------------------
// SCOUT

ScoutSystem::ScoutSystem(const Pmf& pmf, int b)
    : pmf_(pmf), b_(b), index_(StateIndex::scout_joint(pmf.range())), test_(pmf, b) {
    check_b(b);
}

AlgorithmKind ScoutSystem::algorithm() const { return algo::Scout{-pmf_.n(), pmf_.n()}; }

void ScoutSystem::apply(std::span<const double> prev, std::span<double> out) const {
    const int n = pmf_.n();
    // The TEST block occupies the leading indices in the same layout as test_all.
    const std::size_t testCount = test_.index().size();
    test_.apply(prev.subspan(0, testCount), out.subspan(0, testCount));

    const auto cond = conditional_table(pmf_);
    const double degenerate = prev[index_.degenerate_index()];
    // Inner SCOUT(child, -beta, -alpha-1); degenerate exactly when beta = alpha + 1.
    auto inner = [&](int child, int alpha, int beta) {
        return -beta < -alpha - 1 ? prev[index_.window_index(child, -beta, -alpha - 1)] : degenerate;
    };

    const std::size_t w = static_cast<std::size_t>(2 * n + 1);
    std::vector<double> E(w), spec(w), result(w);
    WindowRecursion rec(n, b_);
    for (int x = -n; x <= n; ++x) {
        const auto& q = cond[pmf_.range().offset(x)];
        for (int beta = -n + 1; beta <= n; ++beta) {
            for (int a = -n; a < beta; ++a) {
                const auto ai = static_cast<std::size_t>(a + n);
                double e = 0.0;
                for (int xp = -x; xp <= n; ++xp) {
                    const double p = q[static_cast<std::size_t>(xp + n)];
                    if (p == 0.0) continue;
                    double cost = prev[index_.test_index(xp, -a)];
                    if (a < -xp) cost += inner(xp, a, beta);
                    e += p * cost;
                }
                E[ai] = e;
                double sp = prev[index_.test_index(-x, -a)];
                if (a < x) sp += inner(-x, a, beta);
                spec[ai] = sp;
            }
            rec.run(x, beta, q, E, spec, result);
            for (int a = -n; a < beta; ++a)
                out[index_.window_index(x, a, beta)] = result[static_cast<std::size_t>(a + n)];
        }
    }
    out[index_.degenerate_index()] = 0.0;
}

std::vector<double> ScoutSystem::window_weights(Window win) const {
    std::vector<double> wts(index_.size(), 0.0);
    for (int x = -pmf_.n(); x <= pmf_.n(); ++x) wts[index_.window_index(x, win.alpha, win.beta)] = pmf_(x);
    return wts;
}

std::vector<double> ScoutSystem::threshold_weights(int s) const {
    std::vector<double> wts(index_.size(), 0.0);
    for (int x = -pmf_.n(); x <= pmf_.n(); ++x) wts[index_.test_index(x, s)] = pmf_(x);
    return wts;
}

std::vector<double> ScoutSystem::root_weights() const { return window_weights(full_window(pmf_.range())); }

// ---------------------------------------------------------------------------
// SOLVE

SolveSystem::SolveSystem(const BinaryParam& q, int b)
    : q_(q.q()), b_(b), t_(t_coeff(q.q(), b)), index_(StateIndex::binary()) {
    check_b(b);
}

void SolveSystem::apply(std::span<const double> prev, std::span<double> out) const {
    const double i0 = prev[index_.binary_index(0)];
    const double i1 = prev[index_.binary_index(1)];
    out[index_.binary_index(0)] = b_ * i1;
    out[index_.binary_index(1)] = i0 + t_ * i1;
}

std::vector<double> SolveSystem::root_weights() const {
    std::vector<double> w(2);
    w[index_.binary_index(0)] = q_;
    w[index_.binary_index(1)] = 1.0 - q_;
    return w;
}

// ---------------------------------------------------------------------------
// Tables

ScaledReal weighted_sum(std::span<const ScaledReal> values, std::span<const double> weights) {
    if (weights.size() != values.size()) throw Error(ErrorCode::InvalidArgument, "weight size mismatch");
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i)
        if (weights[i] > 0.0 && values[i].significand > 0.0) top = std::max(top, values[i].logScale);
    if (std::isinf(top)) return {0.0, 0.0};
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (weights[i] > 0.0 && values[i].significand > 0.0)
            sum += weights[i] * values[i].significand * std::exp(values[i].logScale - top);
    return {sum, top};
}

ComplexityTable::ComplexityTable(AlgorithmKind algorithm, StateIndex index, std::vector<double> rootWeights,
                                 std::vector<Layer> layers)
    : algorithm_(algorithm), index_(std::move(index)), rootWeights_(std::move(rootWeights)),
      layers_(std::move(layers)) {}

const Layer& ComplexityTable::layer(int h) const {
    if (h < 0 || h > h_max())
        throw Error(ErrorCode::InvalidHeight, "height " + std::to_string(h) + " outside table range [0, " +
                                                  std::to_string(h_max()) + "]");
    return layers_[static_cast<std::size_t>(h)];
}

ScaledReal ComplexityTable::entry(int h, const State& st) const {
    const auto i = index_.find(st);
    if (!i) throw Error(ErrorCode::InvalidArgument, "state not present in this table");
    return entry(h, *i);
}

ComplexityTable build_table(const LinearSystem& system, int hMax) {
    if (hMax < 0) throw Error(ErrorCode::InvalidHeight, "h_max must be >= 0");
    const LevelOperator op = LevelOperator::from_system(system);
    std::vector<Layer> layers;
    layers.reserve(static_cast<std::size_t>(hMax) + 1);
    layers.emplace_back(op.size(), ScaledReal{1.0, 0.0});
    if (hMax >= 1) {
        // First step straight from the level map: exact on small rational inputs.
        std::vector<double> ones(op.size(), 1.0), first(op.size());
        system.apply(ones, first);
        Layer l1(op.size());
        for (std::size_t i = 0; i < l1.size(); ++i) l1[i] = {first[i], 0.0};
        layers.push_back(std::move(l1));
    }
    for (int h = 2; h <= hMax; ++h) {
        Layer next(op.size());
        op.apply(layers.back(), next);
        layers.push_back(std::move(next));
    }
    return ComplexityTable(system.algorithm(), system.index(), system.root_weights(), std::move(layers));
}

ComplexityTable test_table(const Pmf& pmf, int b, int s, int hMax) { return build_table(TestSystem(pmf, b, s), hMax); }

ComplexityTable test_all_table(const Pmf& pmf, int b, int hMax) { return build_table(TestSystem(pmf, b), hMax); }

ComplexityTable ab_table(const Pmf& pmf, int b, int hMax) { return build_table(AlphaBetaSystem(pmf, b), hMax); }

ComplexityTable scout_table(const Pmf& pmf, int b, int hMax) { return build_table(ScoutSystem(pmf, b), hMax); }

ComplexityTable solve_table(const BinaryParam& q, int b, int hMax) { return build_table(SolveSystem(q, b), hMax); }

ScaledReal root_marginal(const ComplexityTable& table, int h) { return table.root_marginal(h); }

double log_sum(const ScaledReal& a, const ScaledReal& b) {
    const double la = a.log(), lb = b.log();
    const double top = std::max(la, lb);
    if (std::isinf(top) && top < 0) return top;
    return top + std::log(std::exp(la - top) + std::exp(lb - top));
}

MetaComplexities meta_complexities(const ComplexityTable& testTables, const Pmf& pmf, int h) {
    const StateIndex& idx = testTables.index();
    const int n = pmf.n();
    const Layer& layer = testTables.layer(h);
    for (int s = -n + 1; s <= n; ++s)
        if (!idx.has_test(n, s)) throw Error(ErrorCode::InvalidArgument, "table lacks some TEST thresholds");

    MetaComplexities m;
    std::vector<double> all(idx.size(), 0.0), path(idx.size(), 0.0), single(idx.size(), 0.0);
    double hardestLog = -std::numeric_limits<double>::infinity();
    for (int s = -n + 1; s <= n; ++s) {
        std::fill(single.begin(), single.end(), 0.0);
        for (int x = -n; x <= n; ++x) single[idx.test_index(x, s)] = pmf(x);
        const ScaledReal marginal = weighted_sum(layer, single);
        if (marginal.log() > hardestLog) {
            hardestLog = marginal.log();
            m.hardest = marginal;
            m.hardestThreshold = s;
        }
    }
    for (int x = -n; x <= n; ++x) {
        for (int s = -n + 1; s <= n; ++s) all[idx.test_index(x, s)] = pmf(x);
        for (int s : bisection_path(n, x)) path[idx.test_index(x, s)] = pmf(x);
    }
    m.bruteforce = weighted_sum(layer, all);
    m.bisection = weighted_sum(layer, path);
    m.testAverage = {m.bruteforce.significand / (2.0 * n), m.bruteforce.logScale};
    return m;
}

// ---------------------------------------------------------------------------
// Level operators and power iteration

LevelOperator LevelOperator::from_system(const LinearSystem& system) {
    const std::size_t N = system.index().size();
    // Column j of the operator is the level map applied to e_j.
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(N);
    std::vector<double> basis(N, 0.0), col(N);
    for (std::size_t j = 0; j < N; ++j) {
        basis[j] = 1.0;
        system.apply(basis, col);
        basis[j] = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            if (col[i] != 0.0) rows[i].emplace_back(j, col[i]);
    }
    LevelOperator op;
    op.rowStart_.reserve(N + 1);
    op.rowStart_.push_back(0);
    for (const auto& row : rows) {
        for (const auto& [j, v] : row) {
            op.cols_.push_back(j);
            op.values_.push_back(v);
        }
        op.rowStart_.push_back(op.cols_.size());
    }
    op.rootWeights_ = system.root_weights();
    return op;
}

void LevelOperator::apply(std::span<const double> in, std::span<double> out) const {
    const std::size_t N = size();
    for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (std::size_t k = rowStart_[i]; k < rowStart_[i + 1]; ++k) acc += values_[k] * in[cols_[k]];
        out[i] = acc;
    }
}

void LevelOperator::apply(std::span<const ScaledReal> in, std::span<ScaledReal> out) const {
    const std::size_t N = size();
    for (std::size_t i = 0; i < N; ++i) {
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t k = rowStart_[i]; k < rowStart_[i + 1]; ++k) {
            const ScaledReal& v = in[cols_[k]];
            if (v.significand > 0.0) top = std::max(top, v.logScale);
        }
        if (std::isinf(top)) {
            out[i] = {0.0, 0.0};
            continue;
        }
        double acc = 0.0;
        for (std::size_t k = rowStart_[i]; k < rowStart_[i + 1]; ++k) {
            const ScaledReal& v = in[cols_[k]];
            if (v.significand > 0.0) acc += values_[k] * v.significand * std::exp(v.logScale - top);
        }
        // Keep significands near 1 so long products never leave double range.
        if (acc > 0.0 && (acc > 1e150 || acc < 1e-150)) {
            const double l = std::log(acc);
            out[i] = {std::exp(l - std::floor(l)), top + std::floor(l)};
        } else {
            out[i] = {acc, top};
        }
    }
}

double LevelOperator::at(std::size_t row, std::size_t col) const {
    for (std::size_t k = rowStart_.at(row); k < rowStart_.at(row + 1); ++k)
        if (cols_[k] == col) return values_[k];
    return 0.0;
}

BranchingFactorEstimate branching_factor(const LevelOperator& op, std::span<const double> weights,
                                         const PowerIterationOptions& opts) {
    const std::size_t N = op.size();
    if (weights.size() != N) throw Error(ErrorCode::InvalidArgument, "functional size mismatch");
    std::vector<double> v(N, 1.0), next(N);
    double logScale = 0.0;
    auto log_functional = [&]() {
        double f = 0.0;
        for (std::size_t i = 0; i < N; ++i) f += weights[i] * v[i];
        return std::log(f) + logScale;
    };

    BranchingFactorEstimate est;
    // logF[k % 3] holds log(weights . op^k ones).
    std::array<double, 3> logF{log_functional(), 0.0, 0.0};
    double prevEstimate = 0.0;
    int stable = 0;
    for (int k = 1; k <= opts.maxIterations; ++k) {
        op.apply(v, next);
        const double top = *std::max_element(next.begin(), next.end());
        if (!(top > 0.0)) throw Error(ErrorCode::AllZero, "operator annihilated the iterate");
        for (std::size_t i = 0; i < N; ++i) v[i] = next[i] / top;
        logScale += std::log(top);
        logF[static_cast<std::size_t>(k % 3)] = log_functional();
        est.iterations = k;
        if (k < 2) continue;
        const double estimate =
            std::exp(0.5 * (logF[static_cast<std::size_t>(k % 3)] - logF[static_cast<std::size_t>((k - 2) % 3)]));
        if (k >= 3) {
            est.residual = std::abs(estimate - prevEstimate) / estimate;
            stable = est.residual < opts.tolerance ? stable + 1 : 0;
        }
        est.r = estimate;
        prevEstimate = estimate;
        if (stable >= opts.stableSteps) {
            est.converged = true;
            break;
        }
    }
    return est;
}

BranchingFactorEstimate branching_factor(const LevelOperator& op, const PowerIterationOptions& opts) {
    return branching_factor(op, op.root_weights(), opts);
}

const BranchingFactorEstimate& require_converged(const BranchingFactorEstimate& est) {
    if (!est.converged)
        throw Error(ErrorCode::NotConverged, "power iteration stopped at r=" + std::to_string(est.r) +
                                                 " with residual " + std::to_string(est.residual));
    return est;
}

BranchingFactorEstimate r_test(const Pmf& pmf, int b, int s, const PowerIterationOptions& opts) {
    return branching_factor(LevelOperator::from_system(TestSystem(pmf, b, s)), opts);
}

BranchingFactorEstimate r_test_global(const Pmf& pmf, int b, const PowerIterationOptions& opts) {
    BranchingFactorEstimate best;
    best.converged = true;
    bool first = true;
    for (int s = -pmf.n() + 1; s <= pmf.n(); ++s) {
        const BranchingFactorEstimate e = r_test(pmf, b, s, opts);
        if (first || e.r > best.r) {
            best.r = e.r;
            first = false;
        }
        best.iterations = std::max(best.iterations, e.iterations);
        best.residual = std::max(best.residual, e.residual);
        best.converged = best.converged && e.converged;
    }
    return best;
}

BranchingFactorEstimate r_alphabeta(const Pmf& pmf, int b, const PowerIterationOptions& opts) {
    return branching_factor(LevelOperator::from_system(AlphaBetaSystem(pmf, b)), opts);
}

BranchingFactorEstimate r_scout(const Pmf& pmf, int b, const PowerIterationOptions& opts) {
    return branching_factor(LevelOperator::from_system(ScoutSystem(pmf, b)), opts);
}

// ---------------------------------------------------------------------------
// Binary SOLVE closed forms

double t_coeff(double q, int b) {
    check_b(b);
    (void)BinaryParam{q};
    double t = 0.0;
    for (int k = 1; k <= b - 1; ++k)
        t += (1.0 + (b - k - 1) * q) / b * k * std::pow(1.0 - q, k);
    return t;
}

double solve_branching(double q, int b) {
    const double t = t_coeff(q, b);
    return (t + std::sqrt(t * t + 4.0 * b)) / 2.0;
}

double saks_bound(int b) {
    check_b(b);
    const double bd = b;
    return (bd - 1.0 + std::sqrt(bd * bd + 14.0 * bd + 1.0)) / 4.0;
}

std::string to_string(ClosedFormVariant v) {
    switch (v) {
        case ClosedFormVariant::AsPrinted: return "as-printed";
        case ClosedFormVariant::Mirrored: return "q-mirrored";
        case ClosedFormVariant::Both: return "both";
        case ClosedFormVariant::Neither: return "neither";
    }
    return "unknown";
}

SolveComplexity solve_complexity(double q, int b, int h) {
    if (h < 0) throw Error(ErrorCode::InvalidHeight, "h must be >= 0");
    const ComplexityTable table = solve_table(BinaryParam(q), b, h);
    const double t = t_coeff(q, b);
    const double root = std::sqrt(t * t + 4.0 * b);
    const double r1 = (t + root) / 2.0, r2 = (t - root) / 2.0;
    const double A = 0.5 + (1.0 + t / 2.0) / root;
    // G(k) = A r1^k + (1-A) r2^k solves G(k) = t G(k-1) + b G(k-2) with G(0) = 1, G(1) = 1 + t.
    auto G = [&](int k) { return A * std::pow(r1, k) + (1.0 - A) * std::pow(r2, k); };
    SolveComplexity out;
    out.recursive = table.root_marginal(h);
    out.closedFormAsPrinted = q * G(h) + b * (1.0 - q) * G(h - 1);
    out.closedFormMirrored = (1.0 - q) * G(h) + b * q * G(h - 1);
    return out;
}

ClosedFormVariant solve_closed_form_match(double q, int b, int hMax, double tol) {
    bool printed = true, mirrored = true;
    for (int h = 0; h <= hMax; ++h) {
        const SolveComplexity c = solve_complexity(q, b, h);
        const double rec = c.recursive.value();
        printed = printed && std::abs(c.closedFormAsPrinted - rec) <= tol * rec;
        mirrored = mirrored && std::abs(c.closedFormMirrored - rec) <= tol * rec;
    }
    if (printed && mirrored) return ClosedFormVariant::Both;
    if (printed) return ClosedFormVariant::AsPrinted;
    if (mirrored) return ClosedFormVariant::Mirrored;
    return ClosedFormVariant::Neither;
}

double xi_root(int b) {
    check_b(b);
    double lo = 0.0, hi = 1.0;  // f(0) = -1 < 0, f(1) = 1 > 0, f increasing
    while (hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        if (std::pow(mid, b) + mid - 1.0 < 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double r_solve_standard(double q0, int b) {
    (void)BinaryParam{q0};
    const double xi = xi_root(b);
    if (std::abs(q0 - (1.0 - xi)) <= 1e-9) return xi / (1.0 - xi);
    return std::sqrt(static_cast<double>(b));
}

double r_test_standard(double cdfAtThreshold, int b) { return r_solve_standard(cdfAtThreshold, b); }

}  // namespace fgame
