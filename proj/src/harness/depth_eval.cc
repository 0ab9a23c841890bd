#include "mdepose/harness/depth_eval.h"

#include <cmath>
#include <set>
#include <spdlog/spdlog.h>

#include "mdepose/colmap/model_io.h"
#include "mdepose/geometry/two_view.h"
#include "mdepose/harness/evaluate.h"
#include "mdepose/ingest/depth_map.h"
#include "mdepose/ingest/matches.h"
#include "mdepose/ingest/sampling.h"
#include "mdepose/util/error.h"

namespace mdepose::harness {
namespace fs = std::filesystem;

namespace {

struct Accumulator {
    double abs_rel = 0.0;
    double delta1 = 0.0;
    std::size_t images = 0;

    void add(const metrics::DepthScores &s) {
        abs_rel += s.abs_rel;
        delta1 += s.delta1;
        ++images;
    }
};

void score_image(const metrics::DepthEvalInput &in, const DepthEvalOptions &options,
                 std::map<metrics::DepthAlignment, Accumulator> &acc, const std::string &what) {
    for (auto a : options.alignments) {
        try {
            acc[a].add(metrics::evaluate_depth(in, a, options.scale_method));
        } catch (const Error &e) {
            spdlog::warn("{} ({}): {}", what, metrics::depth_alignment_name(a), e.what());
        }
    }
}

void emit_rows(std::vector<DepthMetricRow> &rows, const std::string &scene, const std::string &prov,
               const char *level, const std::map<metrics::DepthAlignment, Accumulator> &acc) {
    for (const auto &[a, s] : acc) {
        if (s.images == 0)
            continue;
        rows.push_back({scene, prov, level, std::string(metrics::depth_alignment_name(a)),
                        s.abs_rel / static_cast<double>(s.images), s.delta1 / static_cast<double>(s.images),
                        s.images});
    }
}

} // namespace

std::vector<DepthMetricRow> evaluate_depth_config(const BenchmarkConfig &config, const DepthEvalOptions &options) {
    std::vector<DepthMetricRow> rows;
    for (const auto &scene : config.scenes) {
        if (scene.depth.empty())
            continue;
        const auto model = colmap::parse_model(scene.model);
        const auto pairs = load_or_sample_pairs(config, scene, model);

        for (const auto &[prov, dir] : scene.depth) {
            std::map<metrics::DepthAlignment, Accumulator> keypoint;
            for (const auto &p : pairs) {
                const std::string key = ingest::pair_key(p.name1, p.name2);
                const fs::path mpath = scene.matches / (key + ".d2pm");
                const fs::path d1path = ingest::depth_map_path(dir, p.name1);
                const fs::path d2path = ingest::depth_map_path(dir, p.name2);
                if (!fs::exists(mpath) || !fs::exists(d1path) || !fs::exists(d2path)) {
                    spdlog::warn("{}: skipping {} for {} (missing input)", scene.name, key, prov);
                    continue;
                }
                const auto K1 = model.intrinsics_of(p.id1);
                const auto K2 = model.intrinsics_of(p.id2);
                const Pose gt = colmap::gt_relative_pose(model, p.id1, p.id2);
                const auto matches = ingest::read_matches(mpath);
                const auto d1 = ingest::sample_depth_nn(ingest::read_pfm(d1path), matches.kp1, K1.width, K1.height);
                const auto d2 = ingest::sample_depth_nn(ingest::read_pfm(d2path), matches.kp2, K2.width, K2.height);
                const auto corrs = ingest::filter_and_cap(matches, d1, d2, config.match_cap);

                const auto E = essential_from_pose(gt);
                if (!E.ok()) {
                    spdlog::warn("{}: skipping {} (degenerate reference pose)", scene.name, key);
                    continue;
                }
                const double tau = options.gt_sampson_px / std::sqrt(K1.fx * K1.fy);
                metrics::DepthEvalInput view1, view2;
                for (const auto &c : corrs) {
                    const auto x1n = normalize_point(c.x1, K1), x2n = normalize_point(c.x2, K2);
                    if (!(sampson_error_sq(*E, x1n, x2n) < tau * tau))
                        continue;
                    const auto tri = triangulate(gt, x1n, x2n);
                    if (!tri.ok())
                        continue;
                    view1.z_est.push_back(*c.d1);
                    view1.z_gt.push_back(tri->d1);
                    view2.z_est.push_back(*c.d2);
                    view2.z_gt.push_back(tri->d2);
                }
                score_image(view1, options, keypoint, scene.name + "/" + p.name1);
                score_image(view2, options, keypoint, scene.name + "/" + p.name2);
            }
            emit_rows(rows, scene.name, prov, "keypoint", keypoint);

            if (!scene.gt_depth)
                continue;
            std::set<std::string> images;
            for (const auto &p : pairs) {
                images.insert(p.name1);
                images.insert(p.name2);
            }
            std::map<metrics::DepthAlignment, Accumulator> dense;
            for (const auto &name : images) {
                const fs::path pred = ingest::depth_map_path(dir, name);
                const fs::path ref = ingest::depth_map_path(*scene.gt_depth, name);
                if (!fs::exists(pred) || !fs::exists(ref)) {
                    spdlog::warn("{}: skipping dense {} for {} (missing input)", scene.name, prov, name);
                    continue;
                }
                const auto gt_map = ingest::read_pfm(ref);
                std::vector<Eigen::Vector2d> pixels;
                pixels.reserve(gt_map.values.size());
                for (int y = 0; y < gt_map.height; ++y)
                    for (int x = 0; x < gt_map.width; ++x)
                        pixels.emplace_back(x, y);
                metrics::DepthEvalInput in;
                in.z_est = ingest::sample_depth_nn(ingest::read_pfm(pred), pixels, gt_map.width, gt_map.height);
                in.z_gt.assign(gt_map.values.begin(), gt_map.values.end());
                in.mask.resize(in.z_est.size());
                for (std::size_t i = 0; i < in.z_est.size(); ++i)
                    in.mask[i] = std::isfinite(in.z_est[i]);
                score_image(in, options, dense, scene.name + "/" + name);
            }
            emit_rows(rows, scene.name, prov, "dense", dense);
        }
    }
    return rows;
}

} // namespace mdepose::harness
