#include "fgame/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace fgame {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ZeroMass: return "ZeroMass";
        case ErrorCode::AllZero: return "AllZero";
        case ErrorCode::InvalidHeight: return "InvalidHeight";
        case ErrorCode::InvalidThreshold: return "InvalidThreshold";
        case ErrorCode::InvalidWindow: return "InvalidWindow";
        case ErrorCode::WrongMode: return "WrongMode";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::StructureError: return "StructureError";
        case ErrorCode::SpecError: return "SpecError";
        case ErrorCode::NotConverged: return "NotConverged";
    }
    return "Unknown";
}

ValueRange::ValueRange(int n) : n_(n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "value range half-width must be >= 1");
}

// ---------------------------------------------------------------------------
// Pmf

Pmf::Pmf(ValueRange range, std::vector<double> probabilities)
    : range_(range), p_(std::move(probabilities)) {
    if (p_.size() != range_.size())
        throw Error(ErrorCode::InvalidArgument, "pmf needs exactly 2n+1 probabilities");
    double sum = 0.0;
    for (double p : p_) {
        if (!(p >= 0.0 && p <= 1.0))
            throw Error(ErrorCode::InvalidArgument, "probabilities must lie in [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw Error(ErrorCode::InvalidArgument, "probabilities must sum to 1");
    if (!(p_.back() > 0.0))
        throw Error(ErrorCode::InvalidArgument, "probability of the top value n must be > 0");
}

Pmf Pmf::uniform(int n) {
    ValueRange r(n);
    return Pmf(r, std::vector<double>(r.size(), 1.0 / static_cast<double>(r.size())));
}

Pmf Pmf::point_mass_max(int n) {
    ValueRange r(n);
    std::vector<double> p(r.size(), 0.0);
    p.back() = 1.0;
    return Pmf(r, std::move(p));
}

Pmf Pmf::from_weights(int n, std::span<const double> weights) {
    ValueRange r(n);
    if (weights.size() != r.size()) throw Error(ErrorCode::SpecError, "weight count must be 2n+1");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::SpecError, "weights must be finite and >= 0");
        total += w;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::SpecError, "weights sum to zero");
    std::vector<double> p(weights.begin(), weights.end());
    for (double& v : p) v /= total;
    return Pmf(r, std::move(p));
}

double Pmf::tail_mass(int lower) const {
    if (!range_.contains(lower)) throw Error(ErrorCode::InvalidArgument, "truncation bound outside value range");
    double m = 0.0;
    for (int v = lower; v <= range_.max(); ++v) m += (*this)(v);
    return m;
}

Pmf truncate(const Pmf& pmf, int lower) {
    const double mass = pmf.tail_mass(lower);
    if (!(mass > 0.0)) throw Error(ErrorCode::ZeroMass, "no mass on {" + std::to_string(lower) + ",...,n}");
    const ValueRange& r = pmf.range();
    std::vector<double> p(r.size(), 0.0);
    for (int v = lower; v <= r.max(); ++v) p[r.offset(v)] = pmf(v) / mass;
    return Pmf(r, std::move(p));
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

}  // namespace

Pmf parse_pmf(std::istream& in) {
    std::string line;
    int lineNo = 0;
    auto next_line = [&]() -> std::istringstream {
        if (!std::getline(in, line)) parse_fail(lineNo + 1, "unexpected end of input");
        ++lineNo;
        return std::istringstream(line);
    };

    auto header = next_line();
    std::string key;
    int n = 0;
    if (!(header >> key >> n) || key != "n") parse_fail(lineNo, "expected `n <n>`");
    std::string rest;
    if (header >> rest) parse_fail(lineNo, "trailing tokens");
    if (n < 1) parse_fail(lineNo, "n must be >= 1");

    std::vector<double> p;
    for (int v = -n; v <= n; ++v) {
        auto row = next_line();
        int value = 0;
        double prob = 0.0;
        if (!(row >> value >> prob)) parse_fail(lineNo, "expected `<value> <probability>`");
        if (row >> rest) parse_fail(lineNo, "trailing tokens");
        if (value != v) parse_fail(lineNo, "expected value " + std::to_string(v));
        p.push_back(prob);
    }
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") != std::string::npos) parse_fail(lineNo, "unexpected content after pmf");
    }
    try {
        return Pmf(ValueRange(n), std::move(p));
    } catch (const Error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

Pmf read_pmf(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    return parse_pmf(in);
}

void write_pmf(std::ostream& out, const Pmf& pmf) {
    out << "n " << pmf.n() << '\n';
    out << std::setprecision(17);
    for (int v = -pmf.n(); v <= pmf.n(); ++v) out << v << ' ' << pmf(v) << '\n';
}

BinaryParam::BinaryParam(double q) : q_(q) {
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidArgument, "q must lie in [0,1]");
}

Threshold::Threshold(const ValueRange& range, int s) : s_(s) {
    if (s < -range.n() + 1 || s > range.n())
        throw Error(ErrorCode::InvalidThreshold, "threshold " + std::to_string(s) + " outside {-n+1,...,n}");
}

Window make_window(const ValueRange& range, int alpha, int beta) {
    if (!range.contains(alpha) || !range.contains(beta))
        throw Error(ErrorCode::InvalidWindow, "window bounds outside value range");
    return {alpha, beta};
}

Window full_window(const ValueRange& range) { return {range.min(), range.max()}; }

// ---------------------------------------------------------------------------
// Scaled arithmetic

double ScaledReal::log() const {
    if (significand <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(significand) + logScale;
}

double ScaledReal::log10() const { return log() / std::log(10.0); }

double ScaledReal::value() const { return std::exp(log()); }

ScaledReal ScaledReal::from_log(double logValue) {
    if (std::isinf(logValue) && logValue < 0) return {0.0, 0.0};
    return {1.0, logValue};
}

ScaledVector::ScaledVector(std::vector<double> significands, double logScale)
    : sig_(std::move(significands)), logScale_(logScale) {
    for (double v : sig_)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "significands must be finite and nonnegative");
}

ScaledVector ScaledVector::ones(std::size_t size) { return ScaledVector(std::vector<double>(size, 1.0), 0.0); }

std::vector<double> ScaledVector::log_values() const {
    std::vector<double> out(sig_.size());
    for (std::size_t i = 0; i < sig_.size(); ++i) out[i] = ScaledReal{sig_[i], logScale_}.log();
    return out;
}

ScaledVector ScaledVector::from_log_values(std::span<const double> logs) {
    double top = -std::numeric_limits<double>::infinity();
    for (double l : logs) top = std::max(top, l);
    if (std::isinf(top) && top < 0) throw Error(ErrorCode::AllZero, "all components are zero");
    std::vector<double> sig(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) sig[i] = std::exp(logs[i] - top);
    return ScaledVector(std::move(sig), top);
}

ScaledVector ScaledVector::renormalized() const {
    double top = 0.0;
    for (double v : sig_) top = std::max(top, v);
    if (!(top > 0.0)) throw Error(ErrorCode::AllZero, "all components are zero");
    if (top == 1.0) return *this;
    std::vector<double> sig(sig_);
    for (double& v : sig) v /= top;
    return ScaledVector(std::move(sig), logScale_ + std::log(top));
}

ScaledReal ScaledVector::dot(std::span<const double> weights) const {
    if (weights.size() != sig_.size()) throw Error(ErrorCode::InvalidArgument, "weight size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < sig_.size(); ++i) s += weights[i] * sig_[i];
    return {s, logScale_};
}

// ---------------------------------------------------------------------------
// StateIndex

void StateIndex::add(const State& st) {
    const std::size_t idx = states_.size();
    states_.push_back(st);
    const int n = range_.n();
    switch (st.kind) {
        case StateKind::Test:
            testSlot_[range_.offset(st.x) * (2 * n) + static_cast<std::size_t>(st.s + n - 1)] =
                static_cast<std::ptrdiff_t>(idx);
            break;
        case StateKind::Window:
            windowSlot_[window_key(st.x, st.alpha, st.beta)] = static_cast<std::ptrdiff_t>(idx);
            break;
        case StateKind::Degenerate: degenerate_ = idx; break;
        case StateKind::Binary:
            if (!binaryBase_) binaryBase_ = idx;
            break;
    }
}

std::size_t StateIndex::window_key(int x, int alpha, int beta) const {
    const std::size_t w = range_.size();
    return (range_.offset(x) * w + range_.offset(alpha)) * w + range_.offset(beta);
}

StateIndex StateIndex::test_pair(const ValueRange& range, int s) {
    Threshold t(range, s);
    StateIndex idx(range);
    idx.testSlot_.assign(range.size() * static_cast<std::size_t>(2 * range.n()), -1);
    for (int th : {t.value(), t.child()})
        for (int x = range.min(); x <= range.max(); ++x) idx.add({StateKind::Test, x, th, 0, 0});
    return idx;
}

StateIndex StateIndex::test_all(const ValueRange& range) {
    StateIndex idx(range);
    idx.testSlot_.assign(range.size() * static_cast<std::size_t>(2 * range.n()), -1);
    for (int s = -range.n() + 1; s <= range.n(); ++s)
        for (int x = range.min(); x <= range.max(); ++x) idx.add({StateKind::Test, x, s, 0, 0});
    return idx;
}

StateIndex StateIndex::windows(const ValueRange& range) {
    StateIndex idx(range);
    idx.windowSlot_.assign(range.size() * range.size() * range.size(), -1);
    for (int x = range.min(); x <= range.max(); ++x)
        for (int a = range.min(); a <= range.max(); ++a)
            for (int b = a + 1; b <= range.max(); ++b) idx.add({StateKind::Window, x, 0, a, b});
    return idx;
}

StateIndex StateIndex::scout_joint(const ValueRange& range) {
    StateIndex idx = test_all(range);
    idx.windowSlot_.assign(range.size() * range.size() * range.size(), -1);
    for (int x = range.min(); x <= range.max(); ++x)
        for (int a = range.min(); a <= range.max(); ++a)
            for (int b = a + 1; b <= range.max(); ++b) idx.add({StateKind::Window, x, 0, a, b});
    idx.add({StateKind::Degenerate, 0, 0, 0, 0});
    return idx;
}

StateIndex StateIndex::binary() {
    StateIndex idx{ValueRange(1)};
    idx.add({StateKind::Binary, 0, 0, 0, 0});
    idx.add({StateKind::Binary, 1, 0, 0, 0});
    return idx;
}

bool StateIndex::has_test(int x, int s) const {
    const int n = range_.n();
    if (testSlot_.empty() || !range_.contains(x) || s < -n + 1 || s > n) return false;
    return testSlot_[range_.offset(x) * (2 * n) + static_cast<std::size_t>(s + n - 1)] >= 0;
}

std::size_t StateIndex::test_index(int x, int s) const {
    if (!has_test(x, s))
        throw Error(ErrorCode::InvalidArgument,
                    "no TEST state (" + std::to_string(x) + "," + std::to_string(s) + ")");
    const int n = range_.n();
    return static_cast<std::size_t>(testSlot_[range_.offset(x) * (2 * n) + static_cast<std::size_t>(s + n - 1)]);
}

std::size_t StateIndex::window_index(int x, int alpha, int beta) const {
    if (windowSlot_.empty() || !range_.contains(x) || !range_.contains(alpha) || !range_.contains(beta) ||
        alpha >= beta)
        throw Error(ErrorCode::InvalidWindow, "no window state (" + std::to_string(x) + "," +
                                                  std::to_string(alpha) + "," + std::to_string(beta) + ")");
    return static_cast<std::size_t>(windowSlot_[window_key(x, alpha, beta)]);
}

std::size_t StateIndex::degenerate_index() const {
    if (!degenerate_) throw Error(ErrorCode::InvalidArgument, "index has no degenerate-window state");
    return *degenerate_;
}

std::size_t StateIndex::binary_index(int x) const {
    if (!binaryBase_ || (x != 0 && x != 1)) throw Error(ErrorCode::InvalidArgument, "no binary state");
    return *binaryBase_ + static_cast<std::size_t>(x);
}

std::optional<std::size_t> StateIndex::find(const State& st) const {
    try {
        switch (st.kind) {
            case StateKind::Test:
                if (!has_test(st.x, st.s)) return std::nullopt;
                return test_index(st.x, st.s);
            case StateKind::Window: return window_index(st.x, st.alpha, st.beta);
            case StateKind::Degenerate:
                if (!degenerate_) return std::nullopt;
                return *degenerate_;
            case StateKind::Binary:
                if (!binaryBase_ || (st.x != 0 && st.x != 1)) return std::nullopt;
                return binary_index(st.x);
        }
    } catch (const Error&) {
    }
    return std::nullopt;
}

}  // namespace fgame
