#include "mdepose/metrics/pose_metrics.h"

#include <cmath>

#include "mdepose/geometry/two_view.h"
#include "mdepose/util/error.h"

namespace mdepose::metrics {

PoseErrors pose_errors(const Pose &estimate, const Pose &gt) {
    PoseErrors e;
    e.e_r = rotation_error(estimate.R, gt.R);
    const auto et = translation_error(estimate.t, gt.t);
    e.e_t = et.ok() ? *et : kFailureErrorDeg;
    if (!std::isfinite(e.e_r))
        e.e_r = kFailureErrorDeg;
    e.e_p = pose_error(e.e_r, e.e_t);
    return e;
}

double maa(std::span<const double> errors_deg, int threshold_deg) {
    if (errors_deg.empty())
        throw Error(ErrorCode::kEmptyInput, "maa of an empty error list");
    if (threshold_deg < 1)
        throw Error(ErrorCode::kInvalidArgument, "maa threshold must be >= 1 degree");
    const double n = static_cast<double>(errors_deg.size());
    double acc = 0.0;
    for (int theta = 1; theta <= threshold_deg; ++theta) {
        std::size_t below = 0;
        for (double e : errors_deg)
            if (std::isfinite(e) && e < theta)
                ++below;
        acc += static_cast<double>(below) / n;
    }
    return acc / threshold_deg;
}

} // namespace mdepose::metrics
