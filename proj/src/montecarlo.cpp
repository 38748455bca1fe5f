#include "fgame/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <thread>

#include "fgame/forward_model.hpp"

namespace fgame {

namespace {

// Resampling stream key; distinct from every trial index in practice.
constexpr std::uint64_t kBootstrapKey = 0xb007'57a9'0000'0001ULL;

bool is_binary(const McConfig& cfg) { return std::holds_alternative<BinaryParam>(cfg.model); }

std::uint64_t run_trial(const McConfig& cfg, std::uint64_t seed) {
    if (is_binary(cfg)) {
        const GameTree t = generate_binary_tree(std::get<BinaryParam>(cfg.model), cfg.b, cfg.h, seed);
        return run_algorithm(t, cfg.algorithm).leafCount;
    }
    const Pmf& pmf = std::get<Pmf>(cfg.model);
    const GameTree t = cfg.rootValue ? generate_tree_from_root(*cfg.rootValue, pmf, cfg.b, cfg.h, seed)
                                     : generate_tree(pmf, cfg.b, cfg.h, seed);
    return run_algorithm(t, cfg.algorithm).leafCount;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

double mean_of(std::span<const std::uint64_t> counts) {
    long double s = 0.0L;
    for (auto c : counts) s += static_cast<long double>(c);
    return static_cast<double>(s / static_cast<long double>(counts.size()));
}

}  // namespace

int McConfig::n() const { return is_binary(*this) ? 1 : std::get<Pmf>(model).n(); }

void McConfig::validate() const {
    if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
    if (!(ciLevel > 0.0 && ciLevel < 1.0)) throw Error(ErrorCode::InvalidArgument, "ciLevel must lie in (0, 1)");
    if (bootstrapResamples < 1) throw Error(ErrorCode::InvalidArgument, "bootstrapResamples must be >= 1");
    if (b < 2) throw Error(ErrorCode::InvalidArgument, "branching degree must be >= 2");
    if (h < 0) throw Error(ErrorCode::InvalidHeight, "height must be >= 0");
    if (std::holds_alternative<algo::TestHardest>(algorithm))
        throw Error(ErrorCode::InvalidArgument, "test-hardest has no per-tree run");
    const bool solve = std::holds_alternative<algo::Solve>(algorithm);
    if (solve != is_binary(*this))
        throw Error(ErrorCode::WrongMode, solve ? "solve needs the binary model" : "binary model supports solve only");
    if (rootValue && is_binary(*this)) throw Error(ErrorCode::InvalidArgument, "root conditioning is integer-only");
    if (rootValue && !std::get<Pmf>(model).range().contains(*rootValue))
        throw Error(ErrorCode::InvalidArgument, "root value outside value range");
}

ConfidenceInterval bootstrap_ci(std::span<const std::uint64_t> counts, int resamples, double level,
                                std::uint64_t seed) {
    if (counts.empty()) throw Error(ErrorCode::InvalidArgument, "no trials to resample");
    if (resamples < 1) throw Error(ErrorCode::InvalidArgument, "resamples must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
    RngStream rng(seed);
    const std::uint64_t m = counts.size();
    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (auto& mean : means) {
        std::uint64_t sum = 0;
        for (std::uint64_t k = 0; k < m; ++k) sum += counts[rng.uniform_below(m)];
        mean = static_cast<double>(sum) / static_cast<double>(m);
    }
    std::sort(means.begin(), means.end());
    const double tail = (1.0 - level) / 2.0;
    const auto last = static_cast<double>(resamples - 1);
    // Linear interpolation between order statistics.
    auto quantile = [&](double p) {
        const double pos = p * last;
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, means.size() - 1);
        return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
    };
    return {quantile(tail), quantile(1.0 - tail)};
}

McResult summarize_prefix(const McResult& run, std::uint64_t trials, const McConfig& cfg) {
    if (trials < 1 || trials > run.perTrialCounts.size())
        throw Error(ErrorCode::InvalidArgument, "prefix length outside the run");
    const std::span<const std::uint64_t> counts(run.perTrialCounts.data(), trials);
    McResult out;
    out.mean = mean_of(counts);
    const ConfidenceInterval ci =
        bootstrap_ci(counts, cfg.bootstrapResamples, cfg.ciLevel, mix_seed(cfg.masterSeed, kBootstrapKey));
    // Percentiles of a skewed resample can straddle the sample mean by rounding; keep the invariant.
    out.ciLow = std::min(ci.low, out.mean);
    out.ciHigh = std::max(ci.high, out.mean);
    out.perTrialCounts.assign(counts.begin(), counts.end());
    out.seedsUsed.assign(run.seedsUsed.begin(), run.seedsUsed.begin() + static_cast<std::ptrdiff_t>(trials));
    return out;
}

McResult mc_estimate(const McConfig& cfg) {
    cfg.validate();
    McResult run;
    run.perTrialCounts.resize(cfg.trials);
    run.seedsUsed.resize(cfg.trials);
    for (std::uint64_t i = 0; i < cfg.trials; ++i) run.seedsUsed[i] = trial_seed(cfg.masterSeed, i);

    unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, cfg.trials));
    // Contiguous index blocks; every trial writes only its own slot.
    auto work = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) run.perTrialCounts[i] = run_trial(cfg, run.seedsUsed[i]);
    };
    if (workers <= 1) {
        work(0, cfg.trials);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (cfg.trials + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t begin = w * chunk, end = std::min(cfg.trials, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
        for (auto& t : pool) t.join();
    }
    return summarize_prefix(run, cfg.trials, cfg);
}

double oracle_value(const McConfig& cfg, const ComplexityTable& table) {
    cfg.validate();
    if (cfg.h > table.h_max()) throw Error(ErrorCode::InvalidHeight, "table is shorter than the configured height");
    const StateIndex& idx = table.index();
    if (is_binary(cfg)) {
        const double q = std::get<BinaryParam>(cfg.model).q();
        std::vector<double> w(idx.size(), 0.0);
        w[idx.binary_index(0)] = q;
        w[idx.binary_index(1)] = 1.0 - q;
        return table.marginal(cfg.h, w).value();
    }
    const Pmf& pmf = std::get<Pmf>(cfg.model);
    const int n = pmf.n();
    auto root_weight = [&](int x) {
        if (cfg.rootValue) return x == *cfg.rootValue ? 1.0 : 0.0;
        return pmf(x);
    };
    std::vector<double> w(idx.size(), 0.0);
    struct Filler {
        const McConfig& cfg;
        const StateIndex& idx;
        std::vector<double>& w;
        int n;
        const std::function<double(int)>& rw;
        void operator()(const algo::Test& a) const {
            for (int x = -n; x <= n; ++x) w[idx.test_index(x, a.s)] += rw(x);
        }
        void operator()(const algo::AlphaBeta& a) const { window(a.alpha, a.beta); }
        void operator()(const algo::Scout& a) const { window(a.alpha, a.beta); }
        void operator()(const algo::TestBruteforce&) const {
            for (int x = -n; x <= n; ++x)
                for (int s = -n + 1; s <= n; ++s) w[idx.test_index(x, s)] += rw(x);
        }
        void operator()(const algo::TestBisection&) const {
            for (int x = -n; x <= n; ++x)
                for (int s : bisection_path(n, x)) w[idx.test_index(x, s)] += rw(x);
        }
        void operator()(const algo::Solve&) const {}
        void operator()(const algo::TestHardest&) const {}
        void window(int alpha, int beta) const {
            if (alpha >= beta) throw Error(ErrorCode::InvalidWindow, "oracle needs an active window");
            const Window win = make_window(ValueRange(n), alpha, beta);
            for (int x = -n; x <= n; ++x) w[idx.window_index(x, win.alpha, win.beta)] += rw(x);
        }
    };
    const std::function<double(int)> rw = root_weight;
    std::visit(Filler{cfg, idx, w, n, rw}, cfg.algorithm);
    return table.marginal(cfg.h, w).value();
}

std::size_t OracleReport::pass_count() const {
    return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const OracleRun& r) { return r.pass; }));
}

double OracleReport::coverage() const {
    return runs.empty() ? 0.0 : static_cast<double>(pass_count()) / static_cast<double>(runs.size());
}

OracleReport validate_against_oracle(const McConfig& cfg, double oracle, std::span<const std::uint64_t> seeds) {
    if (seeds.size() < 5) throw Error(ErrorCode::InvalidArgument, "oracle validation needs at least 5 master seeds");
    OracleReport report;
    report.oracle = oracle;
    McResult pooledRun;
    for (std::uint64_t seed : seeds) {
        McConfig c = cfg;
        c.masterSeed = seed;
        OracleRun r{seed, mc_estimate(c), false};
        r.pass = r.result.ciLow <= oracle && oracle <= r.result.ciHigh;
        pooledRun.perTrialCounts.insert(pooledRun.perTrialCounts.end(), r.result.perTrialCounts.begin(),
                                        r.result.perTrialCounts.end());
        pooledRun.seedsUsed.insert(pooledRun.seedsUsed.end(), r.result.seedsUsed.begin(), r.result.seedsUsed.end());
        report.runs.push_back(std::move(r));
    }
    McConfig pooledCfg = cfg;
    pooledCfg.masterSeed = seeds.front();
    report.pooled = summarize_prefix(pooledRun, pooledRun.perTrialCounts.size(), pooledCfg);
    report.pooledPass = report.pooled.ciLow <= oracle && oracle <= report.pooled.ciHigh;
    return report;
}

OracleReport validate_against_oracle(const McConfig& cfg, const ComplexityTable& table,
                                     std::span<const std::uint64_t> seeds) {
    return validate_against_oracle(cfg, oracle_value(cfg, table), seeds);
}

void write_mc_csv(std::ostream& out, std::span<const McCsvRow> rows) {
    out << kMcCsvHeader << '\n';
    const auto old = out.precision(17);
    for (const auto& r : rows) {
        out << csv_field(r.algorithm) << ',' << csv_field(r.dist) << ',' << r.b << ',' << r.n << ',' << r.h << ',' << r.trials << ','
            << r.seed << ',' << r.mean << ',' << r.ciLow << ',' << r.ciHigh << ',' << r.oracle << ','
            << (r.pass ? "true" : "false") << '\n';
    }
    out.precision(old);
}

}  // namespace fgame
