#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mdepose/colmap/model.h"

namespace mdepose::colmap {

struct ImagePair {
    image_t id1 = 0;
    image_t id2 = 0;
    std::string name1;
    std::string name2;
    double overlap = 0.0;
    Pose gt_relative_pose;
};

// All pairs with overlap >= min_overlap in (id1, id2) order, then
// min(n, available) of them drawn without replacement (partial Fisher-Yates
// on the seeded Rng). Output is in draw order. Throws Error(kNoValidPairs).
std::vector<ImagePair> sample_pairs(const SfmModel &model, double min_overlap, std::size_t n, std::uint64_t seed);

// CSV with header `id1,id2,name1,name2,overlap,qw,qx,qy,qz,tx,ty,tz`.
void write_pairs_csv(const std::vector<ImagePair> &pairs, const std::filesystem::path &path);
std::vector<ImagePair> read_pairs_csv(const std::filesystem::path &path);

} // namespace mdepose::colmap
