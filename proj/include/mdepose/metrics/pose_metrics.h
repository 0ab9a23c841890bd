#pragma once

#include <span>

#include "mdepose/geometry/types.h"

namespace mdepose::metrics {

// Angle a failed estimate is charged with.
inline constexpr double kFailureErrorDeg = 180.0;

struct PoseErrors {
    double e_r = kFailureErrorDeg;
    double e_t = kFailureErrorDeg;
    double e_p = kFailureErrorDeg;
};

// Rotation angle and translation direction angle in degrees, e_p their max.
// An undefined translation direction counts as a failure (180).
PoseErrors pose_errors(const Pose &estimate, const Pose &gt);

// Mean over integer thresholds 1..threshold of the fraction of errors
// strictly below the threshold. Non-finite errors never count. Throws
// Error(kEmptyInput).
double maa(std::span<const double> errors_deg, int threshold_deg = 10);

} // namespace mdepose::metrics
