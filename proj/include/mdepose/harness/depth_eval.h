#pragma once

#include <vector>

#include "mdepose/harness/config.h"
#include "mdepose/harness/report.h"
#include "mdepose/metrics/depth_metrics.h"

namespace mdepose::harness {

struct DepthEvalOptions {
    std::vector<metrics::DepthAlignment> alignments{metrics::DepthAlignment::kScale, metrics::DepthAlignment::kAffine};
    metrics::ScaleMethod scale_method = metrics::ScaleMethod::kLeastSquares;
    // Matches with a Sampson error above this under the reference pose are
    // not triangulated for the keypoint level.
    double gt_sampson_px = 2.0;
};

// Per scene and provenance, images are evaluated one by one (each with its
// own alignment) and averaged:
//   level "keypoint": predicted depth at the filtered matches of every pair
//                     against depth triangulated under the reference pose
//                     (matches consistent with that pose only);
//   level "dense":    full predicted maps against `gt_depth` maps, when the
//                     scene lists them.
std::vector<DepthMetricRow> evaluate_depth_config(const BenchmarkConfig &config, const DepthEvalOptions &options);

} // namespace mdepose::harness
