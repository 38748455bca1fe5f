#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fgame/cli.hpp"

using namespace fgame;
using namespace fgame::cli;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream s(text);
    for (std::string l; std::getline(s, l);) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream s(line);
    for (std::string f; std::getline(s, f, ',');) out.push_back(f);
    return out;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "fgame_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("distribution catalog") {
    const Pmf u = resolve_distribution(parse_distribution("uniform"), 1, 2);
    for (int v = -1; v <= 1; ++v) CHECK(u(v) == doctest::Approx(1.0 / 3));
    const Pmf d = resolve_distribution(parse_distribution("delta_n"), 5, 2);
    CHECK(d(5) == 1.0);
    const Pmf t = resolve_distribution(parse_distribution("triangular"), 1, 2);
    CHECK(t(-1) == doctest::Approx(1.0 / 6));
    CHECK(t(0) == doctest::Approx(2.0 / 6));
    CHECK(t(1) == doctest::Approx(3.0 / 6));
    const Pmf c = resolve_distribution(parse_distribution("cubic"), 1, 2);
    CHECK(c(1) == doctest::Approx(27.0 / 36));

    const Pmf bm = resolve_distribution(parse_distribution("bimodal"), 5, 10);
    double positive = 0.0;
    for (int v = 1; v <= 5; ++v) positive += bm(v);
    CHECK(positive == doctest::Approx(0.2));
    CHECK(bm(1) == doctest::Approx(bm(5)));
    CHECK(bm(-5) == doctest::Approx(bm(0)));
    CHECK(default_bimodal_mass(2) == 0.9);
    CHECK(default_bimodal_mass(10) == doctest::Approx(0.2));

    CHECK_THROWS_AS(resolve_distribution(parse_distribution("bimodal:0.05"), 5, 10), Error);
    CHECK_NOTHROW(resolve_distribution(parse_distribution("bimodal:0.05"), 5, 10, true));
    CHECK_THROWS_AS(resolve_distribution(parse_distribution("bimodal:1.2"), 5, 10, true), Error);
    CHECK_THROWS_AS(parse_distribution("gaussian"), Error);
    CHECK_THROWS_AS(parse_distribution("uniform:3"), Error);
    CHECK_THROWS_AS(parse_distribution("bernoulli"), Error);
    CHECK(std::get<dist::BernoulliQ>(parse_distribution("bernoulli", 0.25)).q == 0.25);
    CHECK(std::holds_alternative<BinaryParam>(resolve_model(parse_distribution("bernoulli:0.3"), 1, 2)));
    CHECK_THROWS_AS(resolve_distribution(parse_distribution("bernoulli:0.3"), 1, 2), Error);
    CHECK(distribution_name(parse_distribution("bimodal:0.3")) == "bimodal:0.3");

    const auto path = scratch("p.pmf");
    {
        std::ofstream f(path);
        f << "n 1\n-1 0.25\n0 0.25\n1 0.5\n";
    }
    const Pmf fromFile = resolve_distribution(parse_distribution("file:" + path.string()), 1, 2);
    CHECK(fromFile(1) == 0.5);
    CHECK_THROWS_AS(resolve_distribution(parse_distribution("file:" + path.string()), 2, 2), Error);
}

TEST_CASE("difficulty classes") {
    CHECK(classify(std::sqrt(10.0), 10).cls == DifficultyClass::Easy);
    CHECK(classify(10.0, 10).cls == DifficultyClass::Hard);
    CHECK(classify(std::pow(10.0, 0.7), 10).cls == DifficultyClass::Medium);
    CHECK(classify(std::pow(10.0, 0.55), 10).cls == DifficultyClass::Easy);
    CHECK(classify(std::pow(10.0, 0.9), 10).cls == DifficultyClass::Hard);
    CHECK(to_string(DifficultyClass::Medium) == "medium");
}

TEST_CASE("algorithm parsing") {
    CHECK(std::get<algo::AlphaBeta>(parse_algorithm("alphabeta", 3, {}, {}, {})).alpha == -3);
    CHECK(std::get<algo::Scout>(parse_algorithm("scout", 3, {}, -1, 2)).beta == 2);
    CHECK(std::get<algo::Test>(parse_algorithm("test", 3, 2, {}, {})).s == 2);
    CHECK_THROWS_AS(parse_algorithm("test", 3, {}, {}, {}), Error);
    CHECK_THROWS_AS(parse_algorithm("alphabeta", 3, {}, 2, 2), Error);
    CHECK_THROWS_AS(parse_algorithm("minimax", 3, {}, {}, {}), Error);
}

TEST_CASE("branching: delta_n TEST at b = 2") {
    const Outcome o = call({"branching", "--dist", "delta_n", "--alg", "test", "--b", "2"});
    REQUIRE(o.code == kExitOk);
    const auto ls = lines(o.out);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == kBranchingCsvHeader);
    const auto f = fields(ls[1]);
    REQUIRE(f.size() == 8);
    CHECK(f[0] == "test");
    CHECK(std::stod(f[4]) == doctest::Approx(1.686141).epsilon(1e-6));
    CHECK(f[7] == "true");
}

TEST_CASE("branching grid is ordered and deterministic") {
    const std::vector<std::string> args{"branching", "--dist", "uniform,cubic", "--alg", "test,alphabeta",
                                        "--b", "2,3", "--n", "2"};
    const Outcome a = call(args), b = call(args);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    const auto ls = lines(a.out);
    REQUIRE(ls.size() == 9);
    CHECK(fields(ls[1])[0] == "test");
    CHECK(fields(ls[1])[1] == "uniform");
    CHECK(fields(ls[1])[2] == "2");
    CHECK(fields(ls[2])[2] == "3");
    CHECK(fields(ls[3])[1] == "cubic");
    CHECK(fields(ls[5])[0] == "alphabeta");
}

TEST_CASE("complexity csv") {
    const Outcome o = call({"complexity", "--dist", "uniform", "--n", "1", "--b", "2", "--h-max", "3", "--alg",
                            "test,alphabeta,test-bruteforce,test-average"});
    REQUIRE(o.code == kExitOk);
    const auto ls = lines(o.out);
    CHECK(ls[0] == kComplexityCsvHeader);
    // test(0), test(1), alphabeta, bruteforce, average; 4 heights each
    CHECK(ls.size() == 1 + 5 * 4);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto f = fields(ls[i]);
        REQUIRE(f.size() == 7);
        if (f[0] == "test-bruteforce") CHECK(std::stod(f[6]) == doctest::Approx(2.0));
        if (f[0] == "test-average") CHECK(std::stod(f[6]) == doctest::Approx(1.0));
        if (f[4] == "0") CHECK(std::abs(std::stod(f[5]) - (f[0] == "test-bruteforce" ? std::log10(2.0) : 0.0)) < 1e-12);
    }

    const Outcome s = call({"complexity", "--dist", "bernoulli:0.3", "--b", "3", "--h-max", "2", "--alg", "solve"});
    REQUIRE(s.code == kExitOk);
    CHECK(fields(lines(s.out)[3])[6] == "nan");
}

TEST_CASE("gen and run round trip") {
    const auto path = scratch("t.tree");
    CHECK(call({"gen", "--dist", "uniform", "--b", "3", "--n", "2", "--h", "3", "--seed", "5", "--out", path.string()})
              .code == kExitOk);
    const Outcome full = call({"run", path.string(), "--alg", "alphabeta"});
    REQUIRE(full.code == kExitOk);
    const GameTree t = read_tree(path.string());
    CHECK(lines(full.out)[1].rfind("\"alphabeta(-2,2)\"," + std::to_string(t.root_value()) + ",", 0) == 0);
    const Outcome sc = call({"run", path.string(), "--alg", "test", "--s", "1"});
    const auto row = fields(lines(sc.out)[1]);
    REQUIRE(row.size() == 3);
    CHECK(row[0] == "test(1)");
    CHECK((std::stoi(row[1]) >= 1) == (t.root_value() >= 1));
    CHECK(std::stoul(row[2]) >= 1);

    const auto bpath = scratch("b.tree");
    CHECK(call({"gen", "--dist", "bernoulli", "--q", "0.4", "--b", "2", "--h", "4", "--out", bpath.string()}).code ==
          kExitOk);
    CHECK(read_tree(bpath.string()).mode() == TreeMode::Binary);
    CHECK(call({"run", bpath.string(), "--alg", "solve"}).code == kExitOk);
    CHECK(call({"run", bpath.string(), "--alg", "test", "--s", "1"}).code == kExitUsage);
}

TEST_CASE("mc csv") {
    const Outcome o = call({"mc", "--dist", "uniform", "--n", "1", "--b", "2", "--h", "2", "--alg", "alphabeta",
                            "--trials", "200", "--seed", "1,2,3,4,5"});
    REQUIRE(o.code == kExitOk);
    const auto ls = lines(o.out);
    CHECK(ls[0] == kMcCsvHeader);
    // checkpoints 10, 20, 50, 100, 200 per seed
    CHECK(ls.size() == 1 + 5 * 5);
}

TEST_CASE("fig2 writes three csv files per column") {
    const auto dir = scratch("fig2");
    std::filesystem::remove_all(dir);
    const Outcome o = call({"fig2", "--h-max", "30", "--out", dir.string()});
    REQUIRE(o.code == kExitOk);
    for (const char* col : {"col1_uniform", "col2_triangular", "col3_cubic", "col4_bimodal"})
        for (const char* kind : {"_pmf.csv", "_difficulty.csv", "_ratio.csv"})
            CHECK(std::filesystem::exists(dir / (std::string(col) + kind)));
    std::ifstream ratio(dir / "col1_uniform_ratio.csv");
    std::string header;
    std::getline(ratio, header);
    CHECK(header == kComplexityCsvHeader);
    int bruteforceRows = 0;
    for (std::string l; std::getline(ratio, l);) {
        const auto f = fields(l);
        if (f[0] == "test-bruteforce") {
            ++bruteforceRows;
            // sum over 2n thresholds divided by their mean
            CHECK(std::stod(f[6]) == doctest::Approx(10.0).epsilon(1e-10));
        }
    }
    CHECK(bruteforceRows == 31);
    std::ifstream pmf(dir / "col2_triangular_pmf.csv");
    std::getline(pmf, header);
    CHECK(header == kPmfCsvHeader);
    std::ifstream diff(dir / "col3_cubic_difficulty.csv");
    std::getline(diff, header);
    CHECK(header == kDifficultyCsvHeader);
}

TEST_CASE("usage errors") {
    CHECK(call({}).code == kExitUsage);
    CHECK(call({"nonsense"}).code == kExitUsage);
    CHECK(call({"branching", "--dist", "gaussian"}).code == kExitUsage);
    CHECK(call({"branching", "--b", "x"}).code == kExitUsage);
    CHECK(call({"complexity", "--dist", "bimodal:0.05", "--b", "10"}).code == kExitUsage);
    CHECK(call({"complexity", "--dist", "uniform", "--alg", "solve"}).code == kExitUsage);
    CHECK(call({"run", "/nonexistent/tree", "--alg", "scout"}).code == kExitUsage);
    const Outcome e = call({"mc", "--alg", "test-hardest", "--dist", "uniform"});
    CHECK(e.code == kExitUsage);
    CHECK_FALSE(e.err.empty());
    CHECK(call({"--help"}).code == kExitOk);
}
