#include "mdepose/robust/estimator.h"

#include <cmath>
#include <limits>

#include "mdepose/geometry/two_view.h"
#include "mdepose/robust/refinement.h"
#include "mdepose/util/random.h"

namespace mdepose {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Prepared {
    std::vector<Correspondence> normalized;
    std::span<const Correspondence> pixel;
};

Prepared prepare(std::span<const Correspondence> corrs, const CameraIntrinsics &K1, const CameraIntrinsics &K2) {
    Prepared p;
    p.pixel = corrs;
    p.normalized.reserve(corrs.size());
    for (const Correspondence &c : corrs) {
        Correspondence n = c;
        n.x1 = normalize_point(c.x1, K1);
        n.x2 = normalize_point(c.x2, K2);
        p.normalized.push_back(n);
    }
    return p;
}

// Per-point scorer for one model. Squared residuals are in the units of the
// matching threshold.
class Scorer {
  public:
    Scorer(const ScaledPose &sp, const EstimatorConfig &config, const CameraIntrinsics &K1,
           const CameraIntrinsics &K2)
        : sp_(sp), K1_(K1), K2_(K2), kind_(config.scoring) {
        const double f = K1.mean_focal();
        focal2_ = f * f;
        sampson_tau2_ = (config.sampson_threshold_px / f) * (config.sampson_threshold_px / f);
        reproj_tau2_ = config.reproj_threshold_px * config.reproj_threshold_px;
        if (kind_ != ResidualKind::kReprojection) {
            auto E = essential_from_pose(sp.pose);
            has_essential_ = E.ok();
            if (has_essential_)
                E_ = *E;
        }
    }

    // Returns the loss and sets *inlier.
    double loss(const Correspondence &pixel, const Correspondence &normalized, bool *inlier) const {
        switch (kind_) {
        case ResidualKind::kSampson: {
            const double s = sampson(normalized);
            *inlier = s < sampson_tau2_;
            return *inlier ? s : sampson_tau2_;
        }
        case ResidualKind::kReprojection: {
            const double s = reproj_sq(pixel);
            *inlier = s < reproj_tau2_;
            return *inlier ? s : reproj_tau2_;
        }
        case ResidualKind::kSampsonPlusReprojection: {
            const double s1 = sampson(normalized);
            const double s2 = reproj_sq(pixel);
            const bool in1 = s1 < sampson_tau2_;
            const bool in2 = s2 < reproj_tau2_;
            *inlier = in1 && in2;
            return focal2_ * (in1 ? s1 : sampson_tau2_) + (in2 ? s2 : reproj_tau2_);
        }
        }
        return kInf;
    }

  private:
    double sampson(const Correspondence &n) const {
        return has_essential_ ? sampson_error_sq(E_, n.x1, n.x2) : kInf;
    }
    double reproj_sq(const Correspondence &c) const {
        if (!c.has_depth())
            return kInf;
        const double e = sym_reprojection_error(sp_, c, K1_, K2_);
        return e * e;
    }

    ScaledPose sp_;
    CameraIntrinsics K1_, K2_;
    ResidualKind kind_;
    EssentialMatrix E_;
    bool has_essential_ = false;
    double focal2_ = 1.0;
    double sampson_tau2_ = 0.0;
    double reproj_tau2_ = 0.0;
};

ModelScore score_prepared(const ScaledPose &sp, const Prepared &data, const EstimatorConfig &config,
                          const CameraIntrinsics &K1, const CameraIntrinsics &K2) {
    const Scorer scorer(sp, config, K1, K2);
    ModelScore out;
    out.inlier_mask.assign(data.pixel.size(), 0);
    for (std::size_t i = 0; i < data.pixel.size(); ++i) {
        bool inlier = false;
        out.score += scorer.loss(data.pixel[i], data.normalized[i], &inlier);
        out.inlier_mask[i] = inlier ? 1 : 0;
        out.num_inliers += inlier ? 1 : 0;
    }
    return out;
}

// Score only; stops accumulating once the total exceeds `cutoff`.
double score_bounded(const ScaledPose &sp, const Prepared &data, const EstimatorConfig &config,
                     const CameraIntrinsics &K1, const CameraIntrinsics &K2, double cutoff) {
    const Scorer scorer(sp, config, K1, K2);
    double score = 0.0;
    for (std::size_t i = 0; i < data.pixel.size(); ++i) {
        bool inlier = false;
        score += scorer.loss(data.pixel[i], data.normalized[i], &inlier);
        if (score > cutoff)
            return score;
    }
    return score;
}

std::vector<Correspondence> select(std::span<const Correspondence> corrs, const std::vector<std::uint8_t> &mask) {
    std::vector<Correspondence> out;
    for (std::size_t i = 0; i < corrs.size(); ++i)
        if (mask[i])
            out.push_back(corrs[i]);
    return out;
}

ScaledPose refine_final(const ScaledPose &sp, std::span<const Correspondence> inliers, const EstimatorConfig &config,
                        const CameraIntrinsics &K1, const CameraIntrinsics &K2) {
    const RefinementObjective objective(inliers, config.local_optimization, RefinementObjective::Loss::kCauchy,
                                        config.sampson_threshold_px, config.reproj_threshold_px, K1, K2);
    LevenbergMarquardtOptions options;
    options.max_iterations = config.final_refinement_iterations;
    options.estimate_sigma = config.uses_depth();
    options.normalize_translation = !config.uses_depth();
    return levenberg_marquardt(objective, sp, options);
}

} // namespace

std::string_view estimator_name(EstimatorId id) {
    switch (id) {
    case EstimatorId::kB:
        return "B";
    case EstimatorId::kH:
        return "H";
    case EstimatorId::kR:
        return "R";
    case EstimatorId::kGtH:
        return "GT-H";
    case EstimatorId::kGtR:
        return "GT-R";
    }
    return "?";
}

std::optional<EstimatorId> parse_estimator_id(std::string_view name) {
    for (EstimatorId id : {EstimatorId::kB, EstimatorId::kH, EstimatorId::kR, EstimatorId::kGtH, EstimatorId::kGtR})
        if (estimator_name(id) == name)
            return id;
    return std::nullopt;
}

std::string_view residual_name(ResidualKind kind) {
    switch (kind) {
    case ResidualKind::kSampson:
        return "sampson";
    case ResidualKind::kReprojection:
        return "reprojection";
    case ResidualKind::kSampsonPlusReprojection:
        return "sampson-plus-reprojection";
    }
    return "?";
}

std::optional<ResidualKind> parse_residual_kind(std::string_view name) {
    for (ResidualKind k :
         {ResidualKind::kSampson, ResidualKind::kReprojection, ResidualKind::kSampsonPlusReprojection})
        if (residual_name(k) == name)
            return k;
    return std::nullopt;
}

EstimatorConfig EstimatorConfig::preset(EstimatorId id) {
    EstimatorConfig c;
    c.id = id;
    switch (id) {
    case EstimatorId::kB:
        c.minimal_solver = MinimalSolverKind::kEssential5pt;
        c.scoring = ResidualKind::kSampson;
        c.local_optimization = ResidualKind::kSampson;
        break;
    case EstimatorId::kH:
    case EstimatorId::kGtH:
        c.minimal_solver = MinimalSolverKind::kDepth3pt;
        c.scoring = ResidualKind::kSampson;
        c.local_optimization = ResidualKind::kSampsonPlusReprojection;
        break;
    case EstimatorId::kR:
    case EstimatorId::kGtR:
        c.minimal_solver = MinimalSolverKind::kDepth3pt;
        c.scoring = ResidualKind::kReprojection;
        c.local_optimization = ResidualKind::kReprojection;
        break;
    }
    return c;
}

void EstimatorConfig::validate() const {
    if (!(sampson_threshold_px > 0.0) || !(reproj_threshold_px > 0.0))
        throw Error(ErrorCode::kConfigError, "thresholds must be positive");
    if (max_iterations < 1)
        throw Error(ErrorCode::kConfigError, "max_iterations must be >= 1");
    if (final_refinement_iterations < 0)
        throw Error(ErrorCode::kConfigError, "final_refinement_iterations must be >= 0");
    const bool depth_residual =
        scoring != ResidualKind::kSampson || local_optimization != ResidualKind::kSampson;
    if (depth_residual && !uses_depth())
        throw Error(ErrorCode::kConfigError, "reprojection residuals need a depth solver");
}

ModelScore score_model(const ScaledPose &sp, std::span<const Correspondence> corrs, const EstimatorConfig &config,
                       const CameraIntrinsics &K1, const CameraIntrinsics &K2) {
    return score_prepared(sp, prepare(corrs, K1, K2), config, K1, K2);
}

ScaledPose local_optimize(const ScaledPose &initial, std::span<const Correspondence> inliers,
                          const EstimatorConfig &config, const CameraIntrinsics &K1, const CameraIntrinsics &K2) {
    const RefinementObjective objective(inliers, config.local_optimization, RefinementObjective::Loss::kTruncated,
                                        config.sampson_threshold_px, config.reproj_threshold_px, K1, K2);
    LevenbergMarquardtOptions options;
    options.max_iterations = 25;
    options.estimate_sigma = config.uses_depth();
    options.normalize_translation = !config.uses_depth();
    LevenbergMarquardtSummary summary;
    const ScaledPose refined = levenberg_marquardt(objective, initial, options, &summary);
    if (!(summary.final_cost < summary.initial_cost))
        return initial;
    return refined;
}

Result<PoseEstimate> ransac_estimate(std::span<const Correspondence> corrs, const EstimatorConfig &config,
                                     const CameraIntrinsics &K1, const CameraIntrinsics &K2, RansacSeed seed) {
    config.validate();
    const std::unique_ptr<MinimalSolver> solver = make_minimal_solver(config.minimal_solver);
    const std::size_t k = solver->sample_size();
    if (corrs.size() < k)
        return Error(ErrorCode::kInsufficientMatches,
                     std::to_string(corrs.size()) + " matches, need " + std::to_string(k));
    if (solver->uses_depth()) {
        for (const Correspondence &c : corrs) {
            if (!c.has_depth() || !(*c.d1 > 0.0) || !(*c.d2 > 0.0) || !std::isfinite(*c.d1) ||
                !std::isfinite(*c.d2))
                return Error(ErrorCode::kInvalidArgument, "depth estimator needs valid depths on every match");
        }
    }

    const Prepared data = prepare(corrs, K1, K2);
    const std::size_t n = corrs.size();
    Rng rng(seed.value);

    bool have_best = false;
    ScaledPose best;
    ModelScore best_score;
    best_score.score = kInf;

    std::vector<std::size_t> indices(k);
    std::vector<Correspondence> sample(k);
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        for (std::size_t j = 0; j < k; ++j) {
            for (;;) {
                const std::size_t idx = rng.uniform_index(n);
                bool repeated = false;
                for (std::size_t m = 0; m < j; ++m)
                    repeated = repeated || indices[m] == idx;
                if (!repeated) {
                    indices[j] = idx;
                    break;
                }
            }
            sample[j] = data.normalized[indices[j]];
        }

        const auto models = solver->solve(sample);
        if (!models)
            continue;

        for (const ScaledPose &model : *models) {
            const double s = score_bounded(model, data, config, K1, K2, best_score.score);
            if (!(s < best_score.score))
                continue;
            ModelScore scored = score_prepared(model, data, config, K1, K2);
            best = model;
            best_score = std::move(scored);
            have_best = true;

            if (best_score.num_inliers >= k) {
                const std::vector<Correspondence> inliers = select(corrs, best_score.inlier_mask);
                const ScaledPose refined = local_optimize(best, inliers, config, K1, K2);
                ModelScore refined_score = score_prepared(refined, data, config, K1, K2);
                if (refined_score.score < best_score.score) {
                    best = refined;
                    best_score = std::move(refined_score);
                }
            }
        }
    }

    if (!have_best || best_score.num_inliers < k)
        return Error(ErrorCode::kEstimationFailed, "no model reached the minimal inlier count");

    if (config.final_refinement_iterations > 0) {
        const std::vector<Correspondence> inliers = select(corrs, best_score.inlier_mask);
        best = refine_final(best, inliers, config, K1, K2);
        best_score = score_prepared(best, data, config, K1, K2);
    }

    PoseEstimate est;
    est.scaled_pose = best;
    est.inlier_mask = std::move(best_score.inlier_mask);
    est.num_inliers = best_score.num_inliers;
    est.score = best_score.score;
    est.iterations_run = config.max_iterations;
    est.success = est.num_inliers >= k;
    if (!est.success)
        return Error(ErrorCode::kEstimationFailed, "final refinement lost the minimal inlier count");
    return est;
}

Result<PoseEstimate> gt_depth_estimate(std::span<const Correspondence> corrs, const Pose &gt_pose,
                                       const EstimatorConfig &config, const CameraIntrinsics &K1,
                                       const CameraIntrinsics &K2, RansacSeed seed) {
    if (!(gt_pose.t.norm() >= 1e-12))
        return Error(ErrorCode::kZeroBaseline, "reference pose has no baseline");

    EstimatorConfig inner = config;
    if (config.id == EstimatorId::kGtH || config.id == EstimatorId::kGtR) {
        const EstimatorConfig base = EstimatorConfig::preset(config.id);
        inner.minimal_solver = base.minimal_solver;
    } else if (!config.uses_depth()) {
        return Error(ErrorCode::kInvalidArgument, "reference-depth baseline needs a depth estimator config");
    }

    std::vector<Correspondence> lifted;
    std::vector<std::size_t> source;
    lifted.reserve(corrs.size());
    for (std::size_t i = 0; i < corrs.size(); ++i) {
        const Correspondence &c = corrs[i];
        auto depths = triangulate(gt_pose, normalize_point(c.x1, K1), normalize_point(c.x2, K2));
        if (!depths)
            continue;
        Correspondence l = c;
        l.d1 = depths->d1;
        l.d2 = depths->d2;
        lifted.push_back(l);
        source.push_back(i);
    }
    if (lifted.size() < 3)
        return Error(ErrorCode::kInsufficientMatches,
                     std::to_string(lifted.size()) + " matches survive triangulation, need 3");

    auto est = ransac_estimate(lifted, inner, K1, K2, seed);
    if (!est)
        return est;
    // Report the inlier mask against the caller's correspondence list.
    PoseEstimate out = std::move(est).value();
    std::vector<std::uint8_t> mask(corrs.size(), 0);
    for (std::size_t j = 0; j < source.size(); ++j)
        mask[source[j]] = out.inlier_mask[j];
    out.inlier_mask = std::move(mask);
    return out;
}

} // namespace mdepose
