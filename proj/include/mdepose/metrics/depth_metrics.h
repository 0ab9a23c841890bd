#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace mdepose::metrics {

// Aligned estimated / ground-truth depths. An empty mask selects every
// entry; either way only entries with finite, positive z_gt take part.
struct DepthEvalInput {
    std::vector<double> z_est;
    std::vector<double> z_gt;
    std::vector<std::uint8_t> mask;

    bool selected(std::size_t i) const;
    std::size_t num_selected() const;
};

double abs_rel(const DepthEvalInput &in);
// Fraction with max(z_gt/z_est, z_est/z_gt) < ratio; z_est <= 0 fails.
double delta1(const DepthEvalInput &in, double ratio = 1.25);

enum class ScaleMethod { kLeastSquares, kMedianRatio };
std::string_view scale_method_name(ScaleMethod m);

struct ScaleAlignment {
    double scale = 1.0;
    DepthEvalInput aligned;
};

// s * z_est with s the least-squares scale sum(z_est z_gt) / sum(z_est^2),
// or the median of z_gt / z_est. Throws EmptyMask, AlignmentDegenerate.
ScaleAlignment align_scale(const DepthEvalInput &in, ScaleMethod method = ScaleMethod::kLeastSquares);

struct AffineAlignment {
    double a = 1.0;
    double b = 0.0;
    DepthEvalInput aligned;
};

// a * z_est + b by least squares; outputs <= 0 are masked out. Throws
// EmptyMask, DegenerateFit.
AffineAlignment align_affine(const DepthEvalInput &in);

enum class DepthAlignment { kNone, kScale, kAffine };
std::string_view depth_alignment_name(DepthAlignment a);

struct DepthScores {
    double abs_rel = 0.0;
    double delta1 = 0.0;
    std::size_t count = 0;
};

DepthScores evaluate_depth(const DepthEvalInput &in, DepthAlignment alignment,
                           ScaleMethod scale_method = ScaleMethod::kLeastSquares);

} // namespace mdepose::metrics
