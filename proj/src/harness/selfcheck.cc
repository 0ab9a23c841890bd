#include "mdepose/harness/selfcheck.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "mdepose/geometry/two_view.h"
#include "mdepose/metrics/pose_metrics.h"
#include "mdepose/robust/estimator.h"
#include "mdepose/synthetic/scene.h"
#include "mdepose/util/random.h"

namespace mdepose::harness {

namespace {

struct NoiseLevel {
    double keypoint_px;
    double depth_sigma;
    double outliers;
};

std::string fmt(const char *format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

class Runner {
  public:
    explicit Runner(const SelfcheckOptions &options) : options_(options) {}

    // Pose error in degrees, 180 on failure.
    double run(EstimatorId id, const synthetic::SyntheticPair &pair, std::uint64_t seed) const {
        const auto r = estimate(id, pair, seed);
        return r.ok() ? metrics::pose_errors(r->scaled_pose.pose, pair.gt_pose).e_p : metrics::kFailureErrorDeg;
    }

    Result<PoseEstimate> estimate(EstimatorId id, const synthetic::SyntheticPair &pair, std::uint64_t seed) const {
        const EstimatorConfig cfg = EstimatorConfig::preset(id);
        std::vector<Correspondence> corrs = pair.correspondences;
        if (options_.inject_fault && cfg.uses_depth())
            for (auto &c : corrs)
                std::swap(c.d1, c.d2);
        if (cfg.is_gt_depth())
            return gt_depth_estimate(corrs, pair.gt_pose, cfg, pair.K1, pair.K2, RansacSeed{seed});
        return ransac_estimate(corrs, cfg, pair.K1, pair.K2, RansacSeed{seed});
    }

  private:
    SelfcheckOptions options_;
};

std::vector<synthetic::SyntheticPair> make_pairs(std::size_t n, std::uint64_t seed, const NoiseLevel &level) {
    SplitMix64 seeds(seed);
    std::vector<synthetic::SyntheticPair> pairs;
    for (std::size_t k = 0; k < n; ++k) {
        synthetic::SceneSpec spec;
        spec.seed = seeds.next();
        spec.keypoint_noise_px = level.keypoint_px;
        spec.outlier_fraction = level.outliers;
        if (level.depth_sigma > 0.0)
            spec.depth_noise = synthetic::DepthNoise::lognormal(level.depth_sigma);
        pairs.push_back(synthetic::generate(spec));
    }
    return pairs;
}

} // namespace

bool SelfcheckSummary::passed() const {
    return !items.empty() && std::all_of(items.begin(), items.end(), [](const auto &i) { return i.passed; });
}

SelfcheckSummary run_selfcheck(const SelfcheckOptions &options) {
    SelfcheckSummary out;
    const Runner runner(options);
    SplitMix64 block_seeds(options.seed);

    {
        const std::uint64_t seed = block_seeds.next();
        const auto pairs = make_pairs(100, seed, {0.0, 0.0, 0.0});
        for (auto id : {EstimatorId::kH, EstimatorId::kR, EstimatorId::kGtH}) {
            double worst = 0.0;
            for (std::size_t k = 0; k < pairs.size(); ++k)
                worst = std::max(worst, runner.run(id, pairs[k], seed + k));
            out.items.push_back({"noiseless " + std::string(estimator_name(id)) + " max e_p", fmt("%.3g deg", worst),
                                 "< 0.001 deg", worst < 1e-3});
        }
    }

    {
        const std::uint64_t seed = block_seeds.next();
        const auto pairs = make_pairs(200, seed, {0.5, 0.05, 0.5});
        for (auto [id, required] : {std::pair{EstimatorId::kH, 0.90}, std::pair{EstimatorId::kB, 0.85}}) {
            std::vector<double> errs;
            for (std::size_t k = 0; k < pairs.size(); ++k)
                errs.push_back(runner.run(id, pairs[k], seed + k));
            const double m = metrics::maa(errs);
            out.items.push_back({"robust " + std::string(estimator_name(id)) + " mAA", fmt("%.4f", m),
                                 ">= " + fmt("%.2f", required), m >= required});
        }
    }

    {
        const std::uint64_t seed = block_seeds.next();
        const auto pairs = make_pairs(20, seed, {0.0, 0.0, 0.0});
        double worst_sigma = 0.0, worst_angle = 0.0;
        bool all_ok = true;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto base = runner.estimate(EstimatorId::kH, pairs[k], seed + k);
            for (double c : {0.25, 3.0}) {
                auto scaled = pairs[k];
                for (auto &corr : scaled.correspondences)
                    *corr.d2 *= c;
                const auto est = runner.estimate(EstimatorId::kH, scaled, seed + k);
                if (!base.ok() || !est.ok()) {
                    all_ok = false;
                    continue;
                }
                const double expected = base->scaled_pose.sigma / c;
                worst_sigma = std::max(worst_sigma, std::abs(est->scaled_pose.sigma - expected) / expected);
                worst_angle = std::max(worst_angle, rotation_error(est->scaled_pose.pose.R, base->scaled_pose.pose.R));
                const auto dt = translation_error(est->scaled_pose.pose.t, base->scaled_pose.pose.t);
                worst_angle = std::max(worst_angle, dt.ok() ? *dt : 180.0);
            }
        }
        out.items.push_back({"gauge sigma relative change", fmt("%.3g", worst_sigma), "< 1e-6",
                             all_ok && worst_sigma < 1e-6});
        out.items.push_back({"gauge pose change", fmt("%.3g deg", worst_angle), "< 1e-6 deg",
                             all_ok && worst_angle < 1e-6});
    }

    {
        const NoiseLevel grid[] = {{0.5, 0.05, 0.3}, {1.0, 0.1, 0.3}, {2.0, 0.2, 0.3}, {3.0, 0.3, 0.3}};
        for (const auto &level : grid) {
            const std::uint64_t seed = block_seeds.next();
            const auto pairs = make_pairs(50, seed, level);
            std::vector<double> h, gt;
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                h.push_back(runner.run(EstimatorId::kH, pairs[k], seed + k));
                gt.push_back(runner.run(EstimatorId::kGtH, pairs[k], seed + k));
            }
            const double mh = metrics::maa(h), mg = metrics::maa(gt);
            out.items.push_back({"GT-H >= H at " + fmt("%.1f px", level.keypoint_px) + ", " +
                                     fmt("sigma_d %.2f", level.depth_sigma),
                                 fmt("%.4f", mg) + " vs " + fmt("%.4f", mh), "GT-H >= H", mg >= mh});
        }
    }
    return out;
}

std::string format_selfcheck(const SelfcheckSummary &summary) {
    std::size_t w0 = 5, w1 = 8, w2 = 8;
    for (const auto &i : summary.items) {
        w0 = std::max(w0, i.name.size());
        w1 = std::max(w1, i.measured.size());
        w2 = std::max(w2, i.required.size());
    }
    auto pad = [](const std::string &s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
    std::string out = pad("check", w0) + "  " + pad("measured", w1) + "  " + pad("required", w2) + "  result\n";
    out += std::string(w0 + w1 + w2 + 14, '-') + "\n";
    for (const auto &i : summary.items)
        out += pad(i.name, w0) + "  " + pad(i.measured, w1) + "  " + pad(i.required, w2) + "  " +
               (i.passed ? "pass" : "FAIL") + "\n";
    out += summary.passed() ? "selfcheck passed\n" : "selfcheck FAILED\n";
    return out;
}

} // namespace mdepose::harness
