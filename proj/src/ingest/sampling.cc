#include "mdepose/ingest/sampling.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdepose/util/error.h"

namespace mdepose::ingest {

std::vector<double> sample_depth_nn(const DepthMap &map, std::span<const Eigen::Vector2d> keypoints, int image_width,
                                    int image_height) {
    if (map.empty())
        throw Error(ErrorCode::kInvalidArgument, "empty depth map");
    if (image_width <= 0 || image_height <= 0)
        throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
    const double sx = static_cast<double>(map.width) / image_width;
    const double sy = static_cast<double>(map.height) / image_height;
    std::vector<double> out;
    out.reserve(keypoints.size());
    for (const auto &kp : keypoints) {
        const double x = std::round(kp.x() * sx);
        const double y = std::round(kp.y() * sy);
        const int px = static_cast<int>(std::clamp(x, 0.0, static_cast<double>(map.width - 1)));
        const int py = static_cast<int>(std::clamp(y, 0.0, static_cast<double>(map.height - 1)));
        out.push_back(map.at(px, py));
    }
    return out;
}

std::vector<Correspondence> filter_and_cap(const MatchFile &matches, std::span<const double> d1,
                                           std::span<const double> d2, std::size_t cap) {
    const std::size_t n = matches.size();
    const bool with_depth = !d1.empty() || !d2.empty();
    if (matches.kp2.size() != n || (with_depth && (d1.size() != n || d2.size() != n)) ||
        (matches.confidence && matches.confidence->size() != n))
        throw Error(ErrorCode::kInvalidArgument, "filter_and_cap inputs are not aligned");

    auto valid = [](double d) { return std::isfinite(d) && d > 0.0; };
    std::vector<std::size_t> keep;
    keep.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!with_depth || (valid(d1[i]) && valid(d2[i])))
            keep.push_back(i);

    if (keep.size() > cap) {
        if (matches.confidence) {
            const auto &conf = *matches.confidence;
            // NaN confidences rank last
            auto key = [&](std::size_t i) { return std::isnan(conf[i]) ? -INFINITY : conf[i]; };
            std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
            keep.resize(cap);
            std::sort(keep.begin(), keep.end());
        } else {
            keep.resize(cap);
        }
    }

    std::vector<Correspondence> out;
    out.reserve(keep.size());
    for (std::size_t i : keep) {
        Correspondence c;
        c.x1 = matches.kp1[i];
        c.x2 = matches.kp2[i];
        if (with_depth) {
            c.d1 = d1[i];
            c.d2 = d2[i];
        }
        out.push_back(c);
    }
    return out;
}

} // namespace mdepose::ingest
