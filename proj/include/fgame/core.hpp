#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fgame/error.hpp"

namespace fgame {

/// Integer value set {-n, ..., n}.
class ValueRange {
public:
    explicit ValueRange(int n);

    int n() const noexcept { return n_; }
    int min() const noexcept { return -n_; }
    int max() const noexcept { return n_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(2 * n_ + 1); }
    bool contains(int v) const noexcept { return v >= -n_ && v <= n_; }
    /// Dense offset of a value, v + n.
    std::size_t offset(int v) const noexcept { return static_cast<std::size_t>(v + n_); }

    friend bool operator==(const ValueRange&, const ValueRange&) = default;

private:
    int n_;
};

/// Categorical distribution over a ValueRange. Immutable; p_n > 0 is enforced
/// so that every truncation {lower, ..., n} keeps positive mass.
class Pmf {
public:
    static constexpr double kSumTolerance = 1e-12;

    Pmf(ValueRange range, std::vector<double> probabilities);

    static Pmf uniform(int n);
    static Pmf point_mass_max(int n);
    /// Normalizes nonnegative weights; throws SpecError if the weights are unusable.
    static Pmf from_weights(int n, std::span<const double> weights);

    const ValueRange& range() const noexcept { return range_; }
    int n() const noexcept { return range_.n(); }
    double operator()(int v) const noexcept { return p_[range_.offset(v)]; }
    std::span<const double> probabilities() const noexcept { return p_; }
    /// Mass on {lower, ..., n}.
    double tail_mass(int lower) const;

    friend bool operator==(const Pmf&, const Pmf&) = default;

private:
    ValueRange range_;
    std::vector<double> p_;
};

/// mu( . | . >= lower), represented over the full range with zeros below lower.
Pmf truncate(const Pmf& pmf, int lower);

/// Strict text format: `n <n>` then 2n+1 lines `<value> <probability>` ascending.
Pmf parse_pmf(std::istream& in);
Pmf read_pmf(const std::string& path);
void write_pmf(std::ostream& out, const Pmf& pmf);

/// Bernoulli parameter of the binary model: probability of drawing a 0.
class BinaryParam {
public:
    explicit BinaryParam(double q);
    double q() const noexcept { return q_; }

private:
    double q_;
};

/// TEST threshold s in {-n+1, ..., n}.
class Threshold {
public:
    Threshold(const ValueRange& range, int s);
    int value() const noexcept { return s_; }
    /// Threshold used by the children: -s + 1.
    int child() const noexcept { return -s_ + 1; }

private:
    int s_;
};

/// Search window (alpha, beta). Degenerate windows (alpha >= beta) are
/// representable because SCOUT returns immediately on them.
struct Window {
    int alpha = 0;
    int beta = 0;

    bool active() const noexcept { return alpha < beta; }
    Window negated() const noexcept { return {-beta, -alpha}; }

    friend bool operator==(const Window&, const Window&) = default;
};

Window make_window(const ValueRange& range, int alpha, int beta);
Window full_window(const ValueRange& range);

/// A real number significand * exp(logScale).
struct ScaledReal {
    double significand = 0.0;
    double logScale = 0.0;

    double log() const;
    double log10() const;
    /// Plain double; overflows to inf for large scales.
    double value() const;

    static ScaledReal from_log(double logValue);
};

/// Vector of nonnegative reals stored as significands sharing one natural-log scale.
class ScaledVector {
public:
    ScaledVector() = default;
    ScaledVector(std::vector<double> significands, double logScale);

    static ScaledVector ones(std::size_t size);

    std::size_t size() const noexcept { return sig_.size(); }
    std::span<const double> significands() const noexcept { return sig_; }
    double logScale() const noexcept { return logScale_; }
    ScaledReal at(std::size_t i) const { return {sig_.at(i), logScale_}; }
    /// Natural log of each component (-inf for zeros).
    std::vector<double> log_values() const;
    static ScaledVector from_log_values(std::span<const double> logs);

    /// Rescales so that the largest significand is exactly 1. Throws AllZero.
    ScaledVector renormalized() const;
    /// sum_i w_i * v_i in scaled form.
    ScaledReal dot(std::span<const double> weights) const;

private:
    std::vector<double> sig_;
    double logScale_ = 0.0;
};

enum class StateKind { Test, Window, Degenerate, Binary };

struct State {
    StateKind kind = StateKind::Test;
    int x = 0;
    int s = 0;       // Test
    int alpha = 0;   // Window
    int beta = 0;    // Window

    friend bool operator==(const State&, const State&) = default;
};

/// Dense bijection between recursion states and indices.
class StateIndex {
public:
    /// (x, s') for s' in {s, -s+1}.
    static StateIndex test_pair(const ValueRange& range, int s);
    /// (x, s) for every threshold s in {-n+1, ..., n}.
    static StateIndex test_all(const ValueRange& range);
    /// (x, alpha, beta) for alpha < beta.
    static StateIndex windows(const ValueRange& range);
    /// test_all block, then the window block, then one degenerate-window state.
    static StateIndex scout_joint(const ValueRange& range);
    /// x in {0, 1}.
    static StateIndex binary();

    const ValueRange& range() const noexcept { return range_; }
    std::size_t size() const noexcept { return states_.size(); }
    const State& state(std::size_t i) const { return states_.at(i); }

    std::optional<std::size_t> find(const State& st) const;
    std::size_t test_index(int x, int s) const;
    std::size_t window_index(int x, int alpha, int beta) const;
    std::size_t degenerate_index() const;
    std::size_t binary_index(int x) const;

    bool has_test(int x, int s) const;
    bool has_windows() const noexcept { return !windowSlot_.empty(); }
    bool has_degenerate() const noexcept { return degenerate_.has_value(); }

private:
    explicit StateIndex(const ValueRange& range) : range_(range) {}
    void add(const State& st);
    std::size_t window_key(int x, int alpha, int beta) const;

    ValueRange range_;
    std::vector<State> states_;
    std::vector<std::ptrdiff_t> testSlot_;    // [x][s + n]
    std::vector<std::ptrdiff_t> windowSlot_;  // [x][alpha][beta]
    std::optional<std::size_t> degenerate_;
    std::optional<std::size_t> binaryBase_;
};

}  // namespace fgame
