#include "fgame/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "fgame/forward_model.hpp"

namespace fgame::cli {

namespace {

double parse_double(const std::string& text, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != text.size()) throw Error(ErrorCode::SpecError, "bad " + what + ": `" + text + "`");
    return v;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
}

/// Runs fn(i) for i in [0, count) on up to hardware_concurrency threads; results kept in index order.
template <typename T>
std::vector<T> parallel_map(std::size_t count, const std::function<T(std::size_t)>& fn) {
    std::vector<std::optional<T>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    const std::size_t workers = std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

/// Output sink: file when a path is given, the command's stream otherwise.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
        } else {
            file_.open(path, std::ios::binary);
            if (!file_) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::stringstream s(item);
        std::string part;
        while (std::getline(s, part, ','))
            if (!part.empty()) out.push_back(part);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Distributions

DistributionSpec parse_distribution(const std::string& text, std::optional<double> defaultQ) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::optional<std::string> arg =
        colon == std::string::npos ? std::nullopt : std::optional<std::string>(text.substr(colon + 1));
    auto no_arg = [&]() {
        if (arg) throw Error(ErrorCode::SpecError, "distribution `" + head + "` takes no parameter");
    };
    if (head == "uniform") return no_arg(), DistributionSpec{dist::Uniform{}};
    if (head == "triangular") return no_arg(), DistributionSpec{dist::Triangular{}};
    if (head == "cubic") return no_arg(), DistributionSpec{dist::Cubic{}};
    if (head == "delta_n") return no_arg(), DistributionSpec{dist::DeltaN{}};
    if (head == "bimodal") {
        dist::BimodalUniform d;
        if (arg) d.positiveMass = parse_double(*arg, "bimodal mass");
        return d;
    }
    if (head == "bernoulli") {
        if (arg) return dist::BernoulliQ{parse_double(*arg, "bernoulli q")};
        if (!defaultQ) throw Error(ErrorCode::SpecError, "bernoulli needs a q (bernoulli:Q or --q)");
        return dist::BernoulliQ{*defaultQ};
    }
    if (head == "file") {
        if (!arg || arg->empty()) throw Error(ErrorCode::SpecError, "file distribution needs a path (file:PATH)");
        return dist::CustomFile{*arg};
    }
    throw Error(ErrorCode::SpecError, "unknown distribution `" + text + "`");
}

std::string distribution_name(const DistributionSpec& spec) {
    struct Namer {
        std::string operator()(const dist::Uniform&) const { return "uniform"; }
        std::string operator()(const dist::Triangular&) const { return "triangular"; }
        std::string operator()(const dist::Cubic&) const { return "cubic"; }
        std::string operator()(const dist::BimodalUniform& d) const {
            return d.positiveMass ? "bimodal:" + format_double(*d.positiveMass) : "bimodal";
        }
        std::string operator()(const dist::DeltaN&) const { return "delta_n"; }
        std::string operator()(const dist::BernoulliQ& d) const { return "bernoulli:" + format_double(d.q); }
        std::string operator()(const dist::CustomFile& d) const {
            return "file:" + std::filesystem::path(d.path).filename().string();
        }
    };
    return std::visit(Namer{}, spec);
}

double default_bimodal_mass(int b) {
    if (b < 2) throw Error(ErrorCode::InvalidArgument, "branching degree must be >= 2");
    return std::min(2.0 / b, 0.9);
}

Pmf resolve_distribution(const DistributionSpec& spec, int n, int b, bool overrideBimodalMass) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    const auto size = static_cast<std::size_t>(2 * n + 1);
    std::vector<double> w(size, 0.0);
    auto weight_by = [&](auto f) {
        for (int v = -n; v <= n; ++v) w[static_cast<std::size_t>(v + n)] = f(v);
        return Pmf::from_weights(n, w);
    };
    struct Resolver {
        int n, b;
        bool overrideMass;
        std::function<Pmf(std::function<double(int)>)> by;
        Pmf operator()(const dist::Uniform&) const { return Pmf::uniform(n); }
        Pmf operator()(const dist::Triangular&) const {
            return by([this](int v) { return static_cast<double>(v + n + 1); });
        }
        Pmf operator()(const dist::Cubic&) const {
            return by([this](int v) { return std::pow(static_cast<double>(v + n + 1), 3); });
        }
        Pmf operator()(const dist::BimodalUniform& d) const {
            const double m = d.positiveMass.value_or(default_bimodal_mass(b));
            if (!(m > 0.0 && m < 1.0)) throw Error(ErrorCode::SpecError, "bimodal mass must lie in (0, 1)");
            if (m <= 1.0 / b && !overrideMass)
                throw Error(ErrorCode::SpecError, "bimodal mass " + format_double(m) + " is not above 1/b = " +
                                                      format_double(1.0 / b) + " (use --override-bimodal-mass)");
            return by([this, m](int v) { return v >= 1 ? m / n : (1.0 - m) / (n + 1); });
        }
        Pmf operator()(const dist::DeltaN&) const { return Pmf::point_mass_max(n); }
        Pmf operator()(const dist::BernoulliQ&) const {
            throw Error(ErrorCode::SpecError, "bernoulli describes the binary model, not an integer pmf");
        }
        Pmf operator()(const dist::CustomFile& d) const {
            Pmf p = read_pmf(d.path);
            if (p.n() != n)
                throw Error(ErrorCode::SpecError, "pmf file has n = " + std::to_string(p.n()) + ", expected " +
                                                      std::to_string(n));
            return p;
        }
    };
    return std::visit(Resolver{n, b, overrideBimodalMass, [&](std::function<double(int)> f) { return weight_by(f); }},
                      spec);
}

TreeModel resolve_model(const DistributionSpec& spec, int n, int b, bool overrideBimodalMass) {
    if (const auto* q = std::get_if<dist::BernoulliQ>(&spec)) return BinaryParam(q->q);
    return resolve_distribution(spec, n, b, overrideBimodalMass);
}

std::string to_string(DifficultyClass c) {
    switch (c) {
        case DifficultyClass::Easy: return "easy";
        case DifficultyClass::Medium: return "medium";
        case DifficultyClass::Hard: return "hard";
    }
    return "unknown";
}

Difficulty classify(double r, int b) {
    if (b < 2) throw Error(ErrorCode::InvalidArgument, "branching degree must be >= 2");
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "branching factor must be positive");
    Difficulty d;
    d.r = r;
    d.b = b;
    d.logbR = std::log(r) / std::log(static_cast<double>(b));
    if (d.logbR <= kEasyCutoff) d.cls = DifficultyClass::Easy;
    else if (d.logbR >= kHardCutoff) d.cls = DifficultyClass::Hard;
    else d.cls = DifficultyClass::Medium;
    return d;
}

AlgorithmKind parse_algorithm(const std::string& name, int n, std::optional<int> s, std::optional<int> alpha,
                              std::optional<int> beta) {
    auto window = [&]() {
        const int a = alpha.value_or(-n), bt = beta.value_or(n);
        if (a >= bt) throw Error(ErrorCode::InvalidWindow, "--alpha must be below --beta");
        return std::pair{a, bt};
    };
    if (name == "solve") return algo::Solve{};
    if (name == "test") {
        if (!s) throw Error(ErrorCode::InvalidThreshold, "test needs --s");
        return algo::Test{*s};
    }
    if (name == "alphabeta") {
        const auto [a, bt] = window();
        return algo::AlphaBeta{a, bt};
    }
    if (name == "scout") {
        const auto [a, bt] = window();
        return algo::Scout{a, bt};
    }
    if (name == "test-bruteforce") return algo::TestBruteforce{};
    if (name == "test-bisection") return algo::TestBisection{};
    if (name == "test-hardest") return algo::TestHardest{};
    throw Error(ErrorCode::InvalidArgument, "unknown algorithm `" + name + "`");
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Common {
    std::vector<std::string> dists{"uniform"};
    std::vector<std::string> bs;
    int n = 5;
    int h = 4;
    int hMax = 5000;
    std::optional<int> s;
    std::optional<int> alpha;
    std::optional<int> beta;
    std::optional<double> q;
    std::vector<std::uint64_t> seeds;
    std::uint64_t trials = 10000;
    std::vector<std::string> algs;
    std::string out;
    std::string format = "csv";
    bool overrideBimodal = false;
    bool strict = false;
    std::string treeFile;
};

std::vector<int> parse_ints(const std::vector<std::string>& items) {
    std::vector<int> out;
    for (const auto& item : split_list(items)) {
        const auto dash = item.find('-', 1);
        try {
            if (dash != std::string::npos) {
                const int lo = std::stoi(item.substr(0, dash)), hi = std::stoi(item.substr(dash + 1));
                if (lo > hi) throw Error(ErrorCode::InvalidArgument, "empty range `" + item + "`");
                for (int v = lo; v <= hi; ++v) out.push_back(v);
            } else {
                std::size_t pos = 0;
                out.push_back(std::stoi(item, &pos));
                if (pos != item.size()) throw std::invalid_argument(item);
            }
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidArgument, "bad integer list item `" + item + "`");
        }
    }
    return out;
}

int single_b(const Common& c, int fallback) {
    const auto bs = parse_ints(c.bs);
    if (bs.empty()) return fallback;
    if (bs.size() != 1) throw Error(ErrorCode::InvalidArgument, "this command takes a single --b");
    return bs.front();
}

DistributionSpec single_dist(const Common& c) {
    const auto ds = split_list(c.dists);
    if (ds.size() != 1) throw Error(ErrorCode::InvalidArgument, "this command takes a single --dist");
    return parse_distribution(ds.front(), c.q);
}

std::uint64_t single_seed(const Common& c) {
    if (c.seeds.size() > 1) throw Error(ErrorCode::InvalidArgument, "this command takes a single --seed");
    return c.seeds.empty() ? 1 : c.seeds.front();
}

void check_format(const Common& c) {
    if (c.format != "csv") throw Error(ErrorCode::InvalidArgument, "only --format csv is supported");
}

int cmd_gen(const Common& c, std::ostream& out) {
    const DistributionSpec spec = single_dist(c);
    const int b = single_b(c, 2);
    const TreeModel model = resolve_model(spec, c.n, b, c.overrideBimodal);
    const std::uint64_t seed = single_seed(c);
    const GameTree tree = std::holds_alternative<BinaryParam>(model)
                              ? generate_binary_tree(std::get<BinaryParam>(model), b, c.h, seed)
                              : generate_tree(std::get<Pmf>(model), b, c.h, seed);
    Sink sink(c.out, out);
    write_tree(*sink, tree);
    return kExitOk;
}

int cmd_run(const Common& c, std::ostream& out) {
    check_format(c);
    const GameTree tree = read_tree(c.treeFile);
    if (c.algs.size() != 1) throw Error(ErrorCode::InvalidArgument, "run takes exactly one --alg");
    const AlgorithmKind kind = parse_algorithm(c.algs.front(), tree.n(), c.s, c.alpha, c.beta);
    const AlgorithmResult r = run_algorithm(tree, kind);
    Sink sink(c.out, out);
    *sink << "alg,value,leaf_count\n" << csv_field(algorithm_name(kind)) << ',' << r.value << ',' << r.leafCount << '\n';
    return kExitOk;
}

struct Series {
    std::string label;
    std::function<ScaledReal(int)> at;
};

void write_complexity_rows(std::ostream& out, const std::vector<Series>& series, const std::string& distName, int b,
                           int n, int hMax, const std::function<std::optional<ScaledReal>(int)>& average) {
    const double ln10 = std::log(10.0);
    for (const auto& s : series) {
        for (int h = 0; h <= hMax; ++h) {
            const ScaledReal v = s.at(h);
            const auto avg = average(h);
            const double ratio = avg ? std::exp(v.log() - avg->log()) : std::nan("");
            out << csv_field(s.label) << ',' << csv_field(distName) << ',' << b << ',' << n << ',' << h << ',' << format_double(v.log() / ln10)
                << ',' << format_double(ratio) << '\n';
        }
    }
}

std::string window_label(const char* name, int alpha, int beta, int n) {
    if (alpha == -n && beta == n) return name;
    return std::string(name) + "[" + std::to_string(alpha) + ":" + std::to_string(beta) + "]";
}

/// Complexity series for one (dist, b, n) cell.
void emit_complexity(std::ostream& out, const Common& c, const DistributionSpec& spec, int b) {
    const std::string distName = distribution_name(spec);
    const TreeModel model = resolve_model(spec, c.n, b, c.overrideBimodal);
    const int hMax = c.hMax;
    if (hMax < 0) throw Error(ErrorCode::InvalidHeight, "--h-max must be >= 0");
    auto algs = split_list(c.algs);
    if (algs.empty()) algs = {"test", "alphabeta", "scout"};

    if (const auto* q = std::get_if<BinaryParam>(&model)) {
        for (const auto& a : algs)
            if (a != "solve") throw Error(ErrorCode::WrongMode, "the binary model supports --alg solve only");
        const ComplexityTable t = solve_table(*q, b, hMax);
        write_complexity_rows(out, {{"solve", [&](int h) { return t.root_marginal(h); }}}, distName, b, 1, hMax,
                              [](int) { return std::nullopt; });
        return;
    }
    const Pmf& pmf = std::get<Pmf>(model);
    const int n = pmf.n();
    const ComplexityTable tests = test_all_table(pmf, b, hMax);
    const TestSystem testSys(pmf, b);
    std::vector<MetaComplexities> meta;
    meta.reserve(static_cast<std::size_t>(hMax) + 1);
    for (int h = 0; h <= hMax; ++h) meta.push_back(meta_complexities(tests, pmf, h));
    auto average = [&](int h) -> std::optional<ScaledReal> { return meta[static_cast<std::size_t>(h)].testAverage; };

    std::vector<Series> series;
    std::optional<ComplexityTable> ab, sc;
    std::vector<std::vector<double>> weights;  // keeps weight vectors alive for the series
    weights.reserve(4 * static_cast<std::size_t>(n) + 4);
    const int alpha = c.alpha.value_or(-n), beta = c.beta.value_or(n);
    for (const auto& a : algs) {
        if (a == "test") {
            std::vector<int> thresholds;
            if (c.s) thresholds = {*c.s};
            else
                for (int s = -n + 1; s <= n; ++s) thresholds.push_back(s);
            for (int s : thresholds) {
                (void)Threshold(pmf.range(), s);
                weights.push_back(testSys.threshold_weights(s));
                const auto* w = &weights.back();
                series.push_back({"test(" + std::to_string(s) + ")", [&tests, w](int h) { return tests.marginal(h, *w); }});
            }
        } else if (a == "alphabeta") {
            if (!ab) ab = ab_table(pmf, b, hMax);
            const Window win = make_window(pmf.range(), alpha, beta);
            if (!win.active()) throw Error(ErrorCode::InvalidWindow, "--alpha must be below --beta");
            weights.push_back(AlphaBetaSystem(pmf, b).window_weights(win));
            const auto* w = &weights.back();
            series.push_back({window_label("alphabeta", alpha, beta, n), [&ab, w](int h) { return ab->marginal(h, *w); }});
        } else if (a == "scout") {
            if (!sc) sc = scout_table(pmf, b, hMax);
            const Window win = make_window(pmf.range(), alpha, beta);
            if (!win.active()) throw Error(ErrorCode::InvalidWindow, "--alpha must be below --beta");
            weights.push_back(ScoutSystem(pmf, b).window_weights(win));
            const auto* w = &weights.back();
            series.push_back({window_label("scout", alpha, beta, n), [&sc, w](int h) { return sc->marginal(h, *w); }});
        } else if (a == "test-bruteforce") {
            series.push_back({a, [&meta](int h) { return meta[static_cast<std::size_t>(h)].bruteforce; }});
        } else if (a == "test-bisection") {
            series.push_back({a, [&meta](int h) { return meta[static_cast<std::size_t>(h)].bisection; }});
        } else if (a == "test-hardest") {
            series.push_back({a, [&meta](int h) { return meta[static_cast<std::size_t>(h)].hardest; }});
        } else if (a == "test-average") {
            series.push_back({a, [&meta](int h) { return meta[static_cast<std::size_t>(h)].testAverage; }});
        } else if (a == "solve") {
            throw Error(ErrorCode::WrongMode, "solve needs --dist bernoulli");
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown algorithm `" + a + "`");
        }
    }
    write_complexity_rows(out, series, distName, b, n, hMax, average);
}

int cmd_complexity(const Common& c, std::ostream& out) {
    check_format(c);
    const DistributionSpec spec = single_dist(c);
    const int b = single_b(c, 10);
    Sink sink(c.out, out);
    *sink << kComplexityCsvHeader << '\n';
    emit_complexity(*sink, c, spec, b);
    return kExitOk;
}

struct BranchingRow {
    std::string alg;
    std::string dist;
    int b;
    int n;
    BranchingFactorEstimate est;
};

BranchingRow branching_cell(const std::string& alg, const DistributionSpec& spec, int b, const Common& c) {
    const TreeModel model = resolve_model(spec, c.n, b, c.overrideBimodal);
    BranchingRow row{alg, distribution_name(spec), b, c.n, {}};
    if (const auto* q = std::get_if<BinaryParam>(&model)) {
        if (alg != "solve") throw Error(ErrorCode::WrongMode, "the binary model supports --alg solve only");
        row.n = 1;
        row.est = branching_factor(LevelOperator::from_system(SolveSystem(*q, b)));
        return row;
    }
    const Pmf& pmf = std::get<Pmf>(model);
    if (alg == "test") {
        if (c.s) {
            row.alg = "test(" + std::to_string(*c.s) + ")";
            row.est = r_test(pmf, b, Threshold(pmf.range(), *c.s).value());
        } else {
            row.est = r_test_global(pmf, b);
        }
    } else if (alg == "alphabeta") {
        row.est = r_alphabeta(pmf, b);
    } else if (alg == "scout") {
        row.est = r_scout(pmf, b);
    } else if (alg == "solve") {
        throw Error(ErrorCode::WrongMode, "solve needs --dist bernoulli");
    } else {
        throw Error(ErrorCode::InvalidArgument, "no branching factor for `" + alg + "`");
    }
    return row;
}

int cmd_branching(const Common& c, std::ostream& out, std::ostream& err) {
    check_format(c);
    auto algs = split_list(c.algs);
    if (algs.empty()) algs = {"test"};
    std::vector<DistributionSpec> specs;
    for (const auto& d : split_list(c.dists)) specs.push_back(parse_distribution(d, c.q));
    auto bs = parse_ints(c.bs);
    if (bs.empty()) bs = {10};

    struct Cell {
        std::size_t alg, dist, b;
    };
    std::vector<Cell> cells;
    for (std::size_t a = 0; a < algs.size(); ++a)
        for (std::size_t d = 0; d < specs.size(); ++d)
            for (std::size_t k = 0; k < bs.size(); ++k) cells.push_back({a, d, k});
    const auto rows = parallel_map<BranchingRow>(cells.size(), [&](std::size_t i) {
        return branching_cell(algs[cells[i].alg], specs[cells[i].dist], bs[cells[i].b], c);
    });

    Sink sink(c.out, out);
    *sink << kBranchingCsvHeader << '\n';
    bool allConverged = true;
    for (const auto& r : rows) {
        *sink << r.alg << ',' << csv_field(r.dist) << ',' << r.b << ',' << r.n << ',' << format_double(r.est.r) << ','
              << r.est.iterations << ',' << format_double(r.est.residual) << ',' << (r.est.converged ? "true" : "false")
              << '\n';
        if (!r.est.converged) {
            allConverged = false;
            err << "warning: " << r.alg << " on " << r.dist << " (b=" << r.b << ") did not converge\n";
        }
    }
    return (!allConverged && c.strict) ? kExitNotConverged : kExitOk;
}

std::vector<std::uint64_t> checkpoints(std::uint64_t trials) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t decade = 10; decade < trials; decade *= 10)
        for (std::uint64_t m : {1, 2, 5})
            if (m * decade < trials) out.push_back(m * decade);
    out.push_back(trials);
    return out;
}

int cmd_mc(const Common& c, std::ostream& out) {
    check_format(c);
    const DistributionSpec spec = single_dist(c);
    const int b = single_b(c, 3);
    const TreeModel model = resolve_model(spec, c.n, b, c.overrideBimodal);
    const int n = std::holds_alternative<BinaryParam>(model) ? 1 : std::get<Pmf>(model).n();
    if (c.algs.size() != 1) throw Error(ErrorCode::InvalidArgument, "mc takes exactly one --alg");
    McConfig cfg;
    cfg.algorithm = parse_algorithm(c.algs.front(), n, c.s, c.alpha, c.beta);
    cfg.model = model;
    cfg.b = b;
    cfg.h = c.h;
    cfg.trials = c.trials;
    cfg.validate();

    std::optional<ComplexityTable> table;
    if (const auto* q = std::get_if<BinaryParam>(&model)) table = solve_table(*q, b, c.h);
    else if (std::holds_alternative<algo::AlphaBeta>(cfg.algorithm)) table = ab_table(std::get<Pmf>(model), b, c.h);
    else if (std::holds_alternative<algo::Scout>(cfg.algorithm)) table = scout_table(std::get<Pmf>(model), b, c.h);
    else table = test_all_table(std::get<Pmf>(model), b, c.h);
    const double oracle = oracle_value(cfg, *table);

    std::vector<std::uint64_t> seeds = c.seeds;
    if (seeds.empty()) seeds = {1, 2, 3, 4, 5};
    std::vector<McCsvRow> rows;
    for (std::uint64_t seed : seeds) {
        McConfig run = cfg;
        run.masterSeed = seed;
        const McResult full = mc_estimate(run);
        for (std::uint64_t t : checkpoints(cfg.trials)) {
            const McResult r = t == cfg.trials ? full : summarize_prefix(full, t, run);
            rows.push_back({algorithm_name(cfg.algorithm), distribution_name(spec), b, n, c.h, t, seed, r.mean, r.ciLow,
                            r.ciHigh, oracle, r.ciLow <= oracle && oracle <= r.ciHigh});
        }
    }
    Sink sink(c.out, out);
    write_mc_csv(*sink, rows);
    return kExitOk;
}

void write_difficulty(std::ostream& out, const DistributionSpec& spec, int n, const std::vector<int>& bs,
                      bool overrideBimodal, bool& allConverged) {
    const auto rows = parallel_map<std::pair<int, BranchingFactorEstimate>>(bs.size(), [&](std::size_t i) {
        const Pmf pmf = resolve_distribution(spec, n, bs[i], overrideBimodal);
        return std::pair{bs[i], r_test_global(pmf, bs[i])};
    });
    for (const auto& [b, est] : rows) {
        const Difficulty d = classify(est.r, b);
        allConverged = allConverged && est.converged;
        out << csv_field(distribution_name(spec)) << ',' << n << ',' << b << ',' << format_double(d.r) << ','
            << format_double(d.logbR) << ',' << to_string(d.cls) << '\n';
    }
}

int cmd_difficulty(const Common& c, std::ostream& out) {
    check_format(c);
    auto bs = parse_ints(c.bs);
    if (bs.empty()) bs = parse_ints({"2-16"});
    Sink sink(c.out, out);
    *sink << kDifficultyCsvHeader << '\n';
    bool converged = true;
    for (const auto& d : split_list(c.dists)) {
        const DistributionSpec spec = parse_distribution(d, c.q);
        if (std::holds_alternative<dist::BernoulliQ>(spec))
            throw Error(ErrorCode::WrongMode, "difficulty is defined for integer distributions");
        write_difficulty(*sink, spec, c.n, bs, c.overrideBimodal, converged);
    }
    return (!converged && c.strict) ? kExitNotConverged : kExitOk;
}

std::string file_stem(const std::string& distName) {
    std::string s = distName;
    for (char& ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '.') ch = '_';
    return s;
}

int cmd_fig2(const Common& c, std::ostream& out) {
    check_format(c);
    const int b = single_b(c, 10);
    auto dists = split_list(c.dists);
    if (dists.empty()) dists = {"uniform", "triangular", "cubic", "bimodal"};
    const std::filesystem::path dir = c.out.empty() ? std::filesystem::path("fig2") : std::filesystem::path(c.out);
    std::filesystem::create_directories(dir);
    Common cc = c;
    cc.algs = {"alphabeta", "scout", "test-bruteforce", "test-bisection", "test-hardest"};
    cc.alpha.reset();
    cc.beta.reset();
    bool converged = true;
    for (std::size_t col = 0; col < dists.size(); ++col) {
        const DistributionSpec spec = parse_distribution(dists[col], c.q);
        const Pmf pmf = resolve_distribution(spec, c.n, b, c.overrideBimodal);
        const std::string stem = "col" + std::to_string(col + 1) + "_" + file_stem(distribution_name(spec));

        std::ofstream pmfOut(dir / (stem + "_pmf.csv"), std::ios::binary);
        pmfOut << kPmfCsvHeader << '\n';
        for (int v = -pmf.n(); v <= pmf.n(); ++v)
            pmfOut << csv_field(distribution_name(spec)) << ',' << pmf.n() << ',' << v << ',' << format_double(pmf(v)) << '\n';

        std::ofstream diffOut(dir / (stem + "_difficulty.csv"), std::ios::binary);
        diffOut << kDifficultyCsvHeader << '\n';
        write_difficulty(diffOut, spec, c.n, parse_ints({"2-20"}),
                         c.overrideBimodal, converged);

        std::ofstream ratioOut(dir / (stem + "_ratio.csv"), std::ios::binary);
        ratioOut << kComplexityCsvHeader << '\n';
        emit_complexity(ratioOut, cc, spec, b);
        if (!pmfOut || !diffOut || !ratioOut) throw Error(ErrorCode::InvalidArgument, "cannot write into " + dir.string());
        out << "wrote " << (dir / stem).string() << "_{pmf,difficulty,ratio}.csv\n";
    }
    return (!converged && c.strict) ? kExitNotConverged : kExitOk;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidHeight:
        case ErrorCode::InvalidThreshold:
        case ErrorCode::InvalidWindow:
        case ErrorCode::WrongMode:
        case ErrorCode::SpecError: return kExitUsage;
        case ErrorCode::NotConverged: return kExitNotConverged;
        default: return kExitFailure;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Average-case complexity of game-tree search on forward-model trees", "fgame"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    Common c;

    auto add_dist = [&](CLI::App* sub, bool many) {
        sub->add_option("--dist", c.dists,
                        many ? "Distributions, comma separated: uniform, triangular, cubic, bimodal[:m], delta_n, "
                               "bernoulli[:q], file:PATH"
                             : "Distribution: uniform, triangular, cubic, bimodal[:m], delta_n, bernoulli[:q], file:PATH")
            ->delimiter(',');
        sub->add_option("--q", c.q, "Probability of a 0 child in the binary model (for a bare `bernoulli`)")
            ->check(CLI::Range(0.0, 1.0));
        sub->add_flag("--override-bimodal-mass", c.overrideBimodal, "Accept a bimodal positive mass <= 1/b");
    };
    auto add_window = [&](CLI::App* sub) {
        sub->add_option("--s", c.s, "TEST threshold");
        sub->add_option("--alpha", c.alpha, "Window lower bound (default -n)");
        sub->add_option("--beta", c.beta, "Window upper bound (default n)");
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--out", c.out, "Output path (stdout if omitted)");
        sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv"}));
    };

    auto* gen = app.add_subcommand("gen", "Sample a forward-model tree and write it");
    add_dist(gen, false);
    gen->add_option("--b", c.bs, "Branching degree")->required();
    gen->add_option("--n", c.n, "Value range {-n..n}")->check(CLI::PositiveNumber);
    gen->add_option("--h", c.h, "Height")->required()->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", c.seeds, "Seed");
    gen->add_option("--out", c.out, "Tree file (stdout if omitted)");

    auto* runCmd = app.add_subcommand("run", "Run one algorithm on a tree file");
    runCmd->add_option("tree", c.treeFile, "Tree file")->required()->check(CLI::ExistingFile);
    runCmd->add_option("--alg", c.algs, "solve | test | alphabeta | scout | test-bruteforce | test-bisection")
        ->required();
    add_window(runCmd);
    add_output(runCmd);

    auto* complexity = app.add_subcommand("complexity", "Exact expected leaf counts per height");
    add_dist(complexity, false);
    complexity->add_option("--b", c.bs, "Branching degree (default 10)");
    complexity->add_option("--n", c.n, "Value range {-n..n}")->check(CLI::PositiveNumber);
    complexity->add_option("--h-max", c.hMax, "Largest height")->check(CLI::NonNegativeNumber);
    complexity
        ->add_option("--alg", c.algs,
                     "test | alphabeta | scout | test-bruteforce | test-bisection | test-hardest | test-average | solve")
        ->delimiter(',');
    add_window(complexity);
    add_output(complexity);

    auto* branching = app.add_subcommand("branching", "Asymptotic branching factors over a grid");
    add_dist(branching, true);
    branching->add_option("--b", c.bs, "Branching degrees: list and ranges, e.g. 2,4,8-10")->delimiter(',');
    branching->add_option("--n", c.n, "Value range {-n..n}")->check(CLI::PositiveNumber);
    branching->add_option("--alg", c.algs, "test | alphabeta | scout | solve")->delimiter(',');
    branching->add_option("--s", c.s, "Single TEST threshold instead of the maximum over thresholds");
    branching->add_flag("--strict", c.strict, "Exit with status 3 when a power iteration does not converge");
    add_output(branching);

    auto* mc = app.add_subcommand("mc", "Monte-Carlo estimate validated against the exact oracle");
    add_dist(mc, false);
    mc->add_option("--b", c.bs, "Branching degree (default 3)");
    mc->add_option("--n", c.n, "Value range {-n..n}")->check(CLI::PositiveNumber);
    mc->add_option("--h", c.h, "Height")->check(CLI::NonNegativeNumber);
    mc->add_option("--alg", c.algs, "solve | test | alphabeta | scout | test-bruteforce | test-bisection")->required();
    mc->add_option("--trials", c.trials, "Trials per seed")->check(CLI::PositiveNumber);
    mc->add_option("--seed", c.seeds, "Master seeds (default 1,2,3,4,5)")->delimiter(',');
    add_window(mc);
    add_output(mc);

    auto* fig2 = app.add_subcommand("fig2", "Per-distribution pmf, difficulty and ratio CSVs");
    fig2->add_option("--dist", c.dists, "Distribution columns (default uniform,triangular,cubic,bimodal)")
        ->delimiter(',');
    fig2->add_flag("--override-bimodal-mass", c.overrideBimodal, "Accept a bimodal positive mass <= 1/b");
    fig2->add_option("--b", c.bs, "Branching degree (default 10)");
    fig2->add_option("--n", c.n, "Value range {-n..n}")->check(CLI::PositiveNumber);
    fig2->add_option("--h-max", c.hMax, "Largest height (default 2000)")->check(CLI::NonNegativeNumber);
    fig2->add_option("--out", c.out, "Output directory (default ./fig2)");
    fig2->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv"}));
    fig2->add_flag("--strict", c.strict, "Exit with status 3 when a power iteration does not converge");

    auto* difficulty = app.add_subcommand("difficulty", "Difficulty class from r versus b");
    add_dist(difficulty, true);
    difficulty->add_option("--b", c.bs, "Branching degrees (default 2-16)")->delimiter(',');
    difficulty->add_option("--n", c.n, "Value range {-n..n}")->check(CLI::PositiveNumber);
    difficulty->add_flag("--strict", c.strict, "Exit with status 3 when a power iteration does not converge");
    add_output(difficulty);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    // Subcommand-specific defaults that differ from the shared ones.
    if (fig2->parsed() && fig2->count("--h-max") == 0) c.hMax = 2000;
    if (fig2->parsed() && fig2->count("--dist") == 0) c.dists.clear();

    try {
        if (gen->parsed()) return cmd_gen(c, out);
        if (runCmd->parsed()) return cmd_run(c, out);
        if (complexity->parsed()) return cmd_complexity(c, out);
        if (branching->parsed()) return cmd_branching(c, out, err);
        if (mc->parsed()) return cmd_mc(c, out);
        if (fig2->parsed()) return cmd_fig2(c, out);
        if (difficulty->parsed()) return cmd_difficulty(c, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace fgame::cli
