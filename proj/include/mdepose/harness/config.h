#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdepose/robust/estimator.h"

namespace mdepose::harness {

inline constexpr int kConfigVersion = 1;

struct SceneConfig {
    std::string name;
    // Scenes sharing a group are averaged first; defaults to the scene name.
    std::string group;
    std::filesystem::path model;
    std::filesystem::path matches;
    std::map<std::string, std::filesystem::path> depth;
    // Dense reference depth maps, used only by depth-eval.
    std::optional<std::filesystem::path> gt_depth;
};

struct PairSamplingConfig {
    double min_overlap = 0.1;
    std::size_t count = 250;
    std::uint64_t seed = 0;
};

struct RansacOverrides {
    std::optional<double> sampson_threshold_px;
    std::optional<double> reproj_threshold_px;
    std::optional<int> max_iterations;
    std::optional<int> final_refinement_iterations;
};

struct BenchmarkConfig {
    std::vector<SceneConfig> scenes;
    std::vector<EstimatorId> estimators{EstimatorId::kB, EstimatorId::kH, EstimatorId::kR};
    PairSamplingConfig pairs;
    RansacOverrides ransac;
    std::size_t match_cap = 2048;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";

    EstimatorConfig estimator_config(EstimatorId id) const;
    // Throws Error(kConfigError) for unknown ids, bad values or missing paths.
    void validate(bool check_paths) const;
};

// JSON config. "${VAR}" in path values is replaced from the environment;
// relative paths are resolved against the config file's directory.
BenchmarkConfig load_config(const std::filesystem::path &path);
void save_config(const BenchmarkConfig &config, const std::filesystem::path &path);

// Expands ${VAR}; unknown variables are a ConfigError.
std::string expand_env(const std::string &value);

// FNV-1a of the canonical serialization.
std::uint64_t config_hash(const BenchmarkConfig &config);

std::string hex64(std::uint64_t value);

} // namespace mdepose::harness
