#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mdepose/colmap/pairs.h"
#include "mdepose/harness/config.h"

namespace mdepose::harness {

// Provenance labels of estimators that ignore predicted depth.
inline constexpr std::string_view kNoDepthProvenance = "none";
inline constexpr std::string_view kGtDepthProvenance = "gt";

inline constexpr std::string_view kResultsSchema = "mdepose-results/1";
inline constexpr std::string_view kResultsHeader = "scene,pair,estimator,provenance,e_r,e_t,e_p,inliers,n_matches,status";

enum class PairStatus {
    kOk,
    kMissingInput,
    kInvalidInput,
    kInsufficientMatches,
    kEstimationFailed,
    kDegeneratePair,
    kSceneFailed,
};

std::string_view status_name(PairStatus s);
std::optional<PairStatus> parse_status(std::string_view s);

struct PairResult {
    std::string scene;
    std::string pair;
    std::string estimator;
    std::string provenance;
    double e_r = 180.0;
    double e_t = 180.0;
    double e_p = 180.0;
    std::size_t inliers = 0;
    std::size_t n_matches = 0;
    PairStatus status = PairStatus::kOk;
};

// Canonical (scene, pair, estimator, provenance) order.
bool canonical_less(const PairResult &a, const PairResult &b);

// RANSAC seed of one evaluation, independent of scheduling.
std::uint64_t pair_seed(std::uint64_t run_seed, const std::string &scene, const std::string &pair,
                        std::string_view estimator);

struct SamplePairsOutcome {
    std::vector<std::filesystem::path> written;
    std::vector<std::string> failures;
};

// Writes `<output>/pairs/<scene>.csv` for every scene; a failing scene is
// reported and the others still run.
SamplePairsOutcome sample_all_pairs(const BenchmarkConfig &config);

std::filesystem::path pairs_csv_path(const BenchmarkConfig &config, const std::string &scene);

// Pair list of one scene: the CSV from sample-pairs when present, otherwise
// freshly sampled and written there.
std::vector<colmap::ImagePair> load_or_sample_pairs(const BenchmarkConfig &config, const SceneConfig &scene,
                                                    const colmap::SfmModel &model);

struct EvaluateOptions {
    int jobs = 1;
};

// Runs every pair x estimator x provenance. Pair lists come from
// `<output>/pairs/<scene>.csv`, sampled first when absent. Results are in
// canonical order.
std::vector<PairResult> evaluate(const BenchmarkConfig &config, const EvaluateOptions &options);

void write_results_csv(const std::vector<PairResult> &results, const std::filesystem::path &path);
std::vector<PairResult> read_results_csv(const std::filesystem::path &path);

} // namespace mdepose::harness
