#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "mdepose/geometry/types.h"
#include "mdepose/ingest/depth_map.h"
#include "mdepose/ingest/matches.h"

namespace mdepose::ingest {

inline constexpr std::size_t kDefaultMatchCap = 2048;

// Raw per-keypoint depths sampled from one MDE output.
struct DepthSampleSet {
    std::string provenance;
    std::vector<double> values;
};

// Nearest-neighbour lookup. Keypoints are first scaled by
// (map.width / image_width, map.height / image_height), rounded half away
// from zero and clamped to the grid. Invalid values are returned as is.
std::vector<double> sample_depth_nn(const DepthMap &map, std::span<const Eigen::Vector2d> keypoints, int image_width,
                                    int image_height);

// Drops matches with a non-finite or non-positive depth, then keeps at most
// `cap`: the highest-confidence ones (ties by index) re-emitted in file
// order, or the first `cap` when there is no confidence. Empty depth spans
// produce depth-less correspondences.
std::vector<Correspondence> filter_and_cap(const MatchFile &matches, std::span<const double> d1,
                                           std::span<const double> d2, std::size_t cap = kDefaultMatchCap);

} // namespace mdepose::ingest
