#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mdepose/harness/config.h"
#include "mdepose/synthetic/emit.h"

namespace mdepose::test {

struct SyntheticBench {
    synthetic::EmittedScene scene;
    harness::BenchmarkConfig config;
};

// Emits a synthetic scene under `root` and a config that evaluates all of its pairs.
inline SyntheticBench make_synthetic_bench(const std::filesystem::path &root, const synthetic::DatasetSpec &spec,
                                           std::vector<EstimatorId> estimators) {
    SyntheticBench b;
    b.scene = synthetic::emit_dataset(spec, root);
    harness::SceneConfig sc;
    sc.name = b.scene.name;
    sc.group = b.scene.name;
    sc.model = b.scene.model_dir;
    sc.matches = b.scene.matches_dir;
    sc.depth = b.scene.depth_dirs;
    b.config.scenes = {sc};
    b.config.estimators = std::move(estimators);
    b.config.pairs.count = spec.num_pairs;
    b.config.pairs.min_overlap = 0.1;
    b.config.output_dir = root / "out";
    return b;
}

} // namespace mdepose::test
