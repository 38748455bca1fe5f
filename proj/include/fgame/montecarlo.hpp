#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fgame/core.hpp"
#include "fgame/recursion.hpp"
#include "fgame/solvers.hpp"

namespace fgame {

using TreeModel = std::variant<Pmf, BinaryParam>;

struct McConfig {
    AlgorithmKind algorithm = algo::Solve{};
    TreeModel model = BinaryParam(0.5);
    int b = 2;
    int h = 0;
    std::uint64_t trials = 1;
    std::uint64_t masterSeed = 0;
    int bootstrapResamples = 1000;
    double ciLevel = 0.95;
    /// Condition on the root value instead of drawing it (integer model only).
    std::optional<int> rootValue;
    /// Worker threads; 0 picks hardware concurrency. Never changes the result.
    unsigned threads = 0;

    int n() const;
    /// Throws InvalidArgument on inconsistent fields.
    void validate() const;
};

struct McResult {
    double mean = 0.0;
    double ciLow = 0.0;
    double ciHigh = 0.0;
    std::vector<std::uint64_t> perTrialCounts;  // in trial-index order
    std::vector<std::uint64_t> seedsUsed;       // per-trial tree seeds
};

/// Tree seed of trial i.
inline std::uint64_t trial_seed(std::uint64_t masterSeed, std::uint64_t trialIndex) {
    return mix_seed(masterSeed, trialIndex);
}

McResult mc_estimate(const McConfig& cfg);

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
};

/// Percentile bootstrap of the mean; resampling stream seeded by `seed`.
ConfidenceInterval bootstrap_ci(std::span<const std::uint64_t> counts, int resamples, double level, std::uint64_t seed);

/// Mean and CI over the first `trials` entries of a finished run (running-mean curves).
McResult summarize_prefix(const McResult& run, std::uint64_t trials, const McConfig& cfg);

/// Exact expected leaf count for cfg read off a table built with the same parameters.
double oracle_value(const McConfig& cfg, const ComplexityTable& table);

struct OracleRun {
    std::uint64_t seed = 0;
    McResult result;
    bool pass = false;  // oracle inside [ciLow, ciHigh]
};

struct OracleReport {
    double oracle = 0.0;
    std::vector<OracleRun> runs;
    /// Trials of every seed pooled, with a bootstrap CI over the pooled counts.
    McResult pooled;
    bool pooledPass = false;

    std::size_t pass_count() const;
    double coverage() const;
};

/// Runs cfg once per master seed (at least 5 required) and compares with the oracle.
OracleReport validate_against_oracle(const McConfig& cfg, double oracle, std::span<const std::uint64_t> seeds);
OracleReport validate_against_oracle(const McConfig& cfg, const ComplexityTable& table,
                                     std::span<const std::uint64_t> seeds);

struct McCsvRow {
    std::string algorithm;
    std::string dist;
    int b = 0;
    int n = 0;
    int h = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    double mean = 0.0;
    double ciLow = 0.0;
    double ciHigh = 0.0;
    double oracle = 0.0;
    bool pass = false;
};

inline constexpr const char* kMcCsvHeader = "algorithm,dist,b,n,h,trials,seed,mean,ci_low,ci_high,oracle,pass";
void write_mc_csv(std::ostream& out, std::span<const McCsvRow> rows);

}  // namespace fgame
