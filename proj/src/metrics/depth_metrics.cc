#include "mdepose/metrics/depth_metrics.h"

#include <algorithm>
#include <cmath>

#include "mdepose/util/error.h"

namespace mdepose::metrics {

namespace {

void check_aligned(const DepthEvalInput &in) {
    if (in.z_est.size() != in.z_gt.size() || (!in.mask.empty() && in.mask.size() != in.z_gt.size()))
        throw Error(ErrorCode::kInvalidArgument, "depth inputs have different lengths");
}

void require_selection(const DepthEvalInput &in) {
    check_aligned(in);
    if (in.num_selected() == 0)
        throw Error(ErrorCode::kEmptyMask, "no valid depth entries selected");
}

} // namespace

bool DepthEvalInput::selected(std::size_t i) const {
    if (!mask.empty() && !mask[i])
        return false;
    return std::isfinite(z_gt[i]) && z_gt[i] > 0.0;
}

std::size_t DepthEvalInput::num_selected() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < z_gt.size(); ++i)
        n += selected(i);
    return n;
}

double abs_rel(const DepthEvalInput &in) {
    require_selection(in);
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < in.z_gt.size(); ++i) {
        if (!in.selected(i))
            continue;
        acc += std::abs(in.z_gt[i] - in.z_est[i]) / in.z_gt[i];
        ++n;
    }
    return acc / static_cast<double>(n);
}

double delta1(const DepthEvalInput &in, double ratio) {
    require_selection(in);
    std::size_t hit = 0, n = 0;
    for (std::size_t i = 0; i < in.z_gt.size(); ++i) {
        if (!in.selected(i))
            continue;
        ++n;
        const double e = in.z_est[i], g = in.z_gt[i];
        if (e > 0.0 && std::max(g / e, e / g) < ratio)
            ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(n);
}

std::string_view scale_method_name(ScaleMethod m) {
    return m == ScaleMethod::kLeastSquares ? "least-squares" : "median-ratio";
}

std::string_view depth_alignment_name(DepthAlignment a) {
    switch (a) {
    case DepthAlignment::kNone:
        return "none";
    case DepthAlignment::kScale:
        return "scale";
    case DepthAlignment::kAffine:
        return "affine";
    }
    return "none";
}

ScaleAlignment align_scale(const DepthEvalInput &in, ScaleMethod method) {
    require_selection(in);
    double s = 0.0;
    if (method == ScaleMethod::kLeastSquares) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < in.z_gt.size(); ++i) {
            if (!in.selected(i))
                continue;
            num += in.z_est[i] * in.z_gt[i];
            den += in.z_est[i] * in.z_est[i];
        }
        s = den > 0.0 ? num / den : 0.0;
    } else {
        std::vector<double> ratios;
        for (std::size_t i = 0; i < in.z_gt.size(); ++i)
            if (in.selected(i) && std::isfinite(in.z_est[i]) && in.z_est[i] > 0.0)
                ratios.push_back(in.z_gt[i] / in.z_est[i]);
        if (!ratios.empty()) {
            const std::size_t mid = ratios.size() / 2;
            std::nth_element(ratios.begin(), ratios.begin() + mid, ratios.end());
            s = ratios[mid];
            if (ratios.size() % 2 == 0)
                s = 0.5 * (s + *std::max_element(ratios.begin(), ratios.begin() + mid));
        }
    }
    if (!std::isfinite(s) || s <= 0.0)
        throw Error(ErrorCode::kAlignmentDegenerate, "fitted scale is not positive");

    ScaleAlignment out{s, in};
    for (double &z : out.aligned.z_est)
        z *= s;
    return out;
}

AffineAlignment align_affine(const DepthEvalInput &in) {
    require_selection(in);
    double n = 0.0, mz = 0.0, mg = 0.0;
    for (std::size_t i = 0; i < in.z_gt.size(); ++i) {
        if (!in.selected(i))
            continue;
        n += 1.0;
        mz += in.z_est[i];
        mg += in.z_gt[i];
    }
    mz /= n;
    mg /= n;
    double szz = 0.0, szg = 0.0;
    for (std::size_t i = 0; i < in.z_gt.size(); ++i) {
        if (!in.selected(i))
            continue;
        szz += (in.z_est[i] - mz) * (in.z_est[i] - mz);
        szg += (in.z_est[i] - mz) * (in.z_gt[i] - mg);
    }
    if (n < 2.0 || !(szz > 1e-24 * n * (mz * mz + 1e-300)))
        throw Error(ErrorCode::kDegenerateFit, "estimated depth is constant over the selection");

    AffineAlignment out;
    out.a = szg / szz;
    out.b = mg - out.a * mz;
    out.aligned = in;
    out.aligned.mask.assign(in.z_gt.size(), 0);
    for (std::size_t i = 0; i < in.z_gt.size(); ++i) {
        const double z = out.a * in.z_est[i] + out.b;
        out.aligned.z_est[i] = z;
        out.aligned.mask[i] = in.selected(i) && z > 0.0;
    }
    return out;
}

DepthScores evaluate_depth(const DepthEvalInput &in, DepthAlignment alignment, ScaleMethod scale_method) {
    DepthEvalInput aligned;
    switch (alignment) {
    case DepthAlignment::kNone:
        aligned = in;
        break;
    case DepthAlignment::kScale:
        aligned = align_scale(in, scale_method).aligned;
        break;
    case DepthAlignment::kAffine:
        aligned = align_affine(in).aligned;
        break;
    }
    return {abs_rel(aligned), delta1(aligned), aligned.num_selected()};
}

} // namespace mdepose::metrics
