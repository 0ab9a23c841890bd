#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mdepose/synthetic/scene.h"

namespace mdepose::synthetic {

struct ProvenanceSpec {
    std::string name;
    DepthNoise noise;
};

struct DatasetSpec {
    std::string scene = "synthetic";
    std::size_t num_pairs = 20;
    // Depth noise in `pair` is ignored; each provenance applies its own.
    SceneSpec pair;
    std::vector<ProvenanceSpec> provenances{{"gt", DepthNoise::none()}};
    bool binary_model = false;
    std::uint64_t seed = 0;
};

struct EmittedScene {
    std::string name;
    std::filesystem::path model_dir;
    std::filesystem::path matches_dir;
    std::map<std::string, std::filesystem::path> depth_dirs;
    std::vector<SyntheticPair> pairs;
};

// Writes one scene under `root/<scene>`:
//   sparse/                  COLMAP model, two images per pair
//   matches/<a>__<b>.d2pm    all correspondences, outliers included
//   depth/<prov>/<img>.pfm   depth at each keypoint's rounded pixel, NaN
//                            elsewhere and where two keypoints collide
EmittedScene emit_dataset(const DatasetSpec &spec, const std::filesystem::path &root);

} // namespace mdepose::synthetic
