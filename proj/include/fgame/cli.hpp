#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fgame/core.hpp"
#include "fgame/montecarlo.hpp"
#include "fgame/recursion.hpp"

namespace fgame::cli {

namespace dist {
struct Uniform {};
struct Triangular {};
struct Cubic {};
struct BimodalUniform {
    std::optional<double> positiveMass;  // default min(2/b, 0.9)
};
struct DeltaN {};
struct BernoulliQ {
    double q;
};
struct CustomFile {
    std::string path;
};
}  // namespace dist

using DistributionSpec = std::variant<dist::Uniform, dist::Triangular, dist::Cubic, dist::BimodalUniform, dist::DeltaN,
                                      dist::BernoulliQ, dist::CustomFile>;

/// uniform | triangular | cubic | bimodal[:m] | delta_n | bernoulli[:q] | file:PATH.
/// A bare `bernoulli` takes q from `defaultQ`.
DistributionSpec parse_distribution(const std::string& text, std::optional<double> defaultQ = std::nullopt);
std::string distribution_name(const DistributionSpec& spec);

double default_bimodal_mass(int b);

/// Integer-valued pmf for the spec. SpecError for BernoulliQ, for a bimodal
/// mass outside (1/b, 1) unless overridden (then only (0, 1) is required),
/// and for custom files whose n differs.
Pmf resolve_distribution(const DistributionSpec& spec, int n, int b, bool overrideBimodalMass = false);
/// Pmf or BinaryParam, depending on the spec.
TreeModel resolve_model(const DistributionSpec& spec, int n, int b, bool overrideBimodalMass = false);

enum class DifficultyClass { Easy, Medium, Hard };
std::string to_string(DifficultyClass c);

struct Difficulty {
    DifficultyClass cls = DifficultyClass::Medium;
    double r = 0.0;
    int b = 0;
    double logbR = 0.0;
};

inline constexpr double kEasyCutoff = 0.55;
inline constexpr double kHardCutoff = 0.9;
Difficulty classify(double r, int b);

/// Algorithm names accepted by --alg.
AlgorithmKind parse_algorithm(const std::string& name, int n, std::optional<int> s, std::optional<int> alpha,
                              std::optional<int> beta);

// Command entry points, used by the tool and the tests. Each returns a process exit code.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNotConverged = 3;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

inline constexpr const char* kComplexityCsvHeader = "alg,dist,b,n,h,log10_complexity,ratio_to_test_avg";
inline constexpr const char* kBranchingCsvHeader = "alg,dist,b,n,r,iterations,residual,converged";
inline constexpr const char* kPmfCsvHeader = "dist,n,value,probability";
inline constexpr const char* kDifficultyCsvHeader = "dist,n,b,r,log_b_r,class";

}  // namespace fgame::cli
