#include "mdepose/synthetic/emit.h"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "mdepose/colmap/model.h"
#include "mdepose/colmap/model_io.h"
#include "mdepose/ingest/depth_map.h"
#include "mdepose/ingest/matches.h"
#include "mdepose/util/error.h"

namespace mdepose::synthetic {
namespace fs = std::filesystem;

namespace {

std::string image_name(std::size_t pair, char view) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "pair%04zu_%c.png", pair, view);
    return buf;
}

// Pixel the NN sampler will read for a keypoint stored as float32.
std::pair<int, int> storage_pixel(const Eigen::Vector2d &kp, const CameraIntrinsics &K) {
    const double x = std::round(static_cast<double>(static_cast<float>(kp.x())));
    const double y = std::round(static_cast<double>(static_cast<float>(kp.y())));
    return {static_cast<int>(std::clamp(x, 0.0, K.width - 1.0)), static_cast<int>(std::clamp(y, 0.0, K.height - 1.0))};
}

ingest::DepthMap sparse_depth_map(const CameraIntrinsics &K, const std::vector<Eigen::Vector2d> &kps,
                                  const std::vector<double> &depths) {
    ingest::DepthMap map;
    map.width = K.width;
    map.height = K.height;
    map.values.assign(static_cast<std::size_t>(K.width) * K.height, std::numeric_limits<float>::quiet_NaN());
    std::set<std::pair<int, int>> used, collided;
    for (std::size_t i = 0; i < kps.size(); ++i) {
        const auto px = storage_pixel(kps[i], K);
        if (!used.insert(px).second)
            collided.insert(px);
        map.at(px.first, px.second) = static_cast<float>(depths[i]);
    }
    for (const auto &px : collided)
        map.at(px.first, px.second) = std::numeric_limits<float>::quiet_NaN();
    return map;
}

} // namespace

EmittedScene emit_dataset(const DatasetSpec &spec, const fs::path &root) {
    if (spec.num_pairs == 0)
        throw Error(ErrorCode::kSpecError, "num_pairs must be positive");
    if (spec.provenances.empty())
        throw Error(ErrorCode::kSpecError, "at least one depth provenance is required");
    std::set<std::string> names;
    for (const auto &p : spec.provenances)
        if (p.name.empty() || !names.insert(p.name).second || p.name.find('/') != std::string::npos)
            throw Error(ErrorCode::kSpecError, "provenance names must be unique, non-empty and contain no '/'");

    EmittedScene out;
    out.name = spec.scene;
    const fs::path scene_dir = root / spec.scene;
    out.model_dir = scene_dir / "sparse";
    out.matches_dir = scene_dir / "matches";
    for (const auto &p : spec.provenances)
        out.depth_dirs[p.name] = scene_dir / "depth" / p.name;
    fs::create_directories(out.model_dir);

    const CameraIntrinsics &K = spec.pair.intrinsics;
    colmap::SfmModel model;
    colmap::Camera cam;
    cam.camera_id = 1;
    cam.model_id = colmap::CameraModelId::kPinhole;
    cam.width = static_cast<std::uint64_t>(K.width);
    cam.height = static_cast<std::uint64_t>(K.height);
    cam.params = {K.fx, K.fy, K.cx, K.cy};
    model.cameras[1] = cam;

    SplitMix64 seeds(spec.seed);
    colmap::point3D_t next_point = 1;
    for (std::size_t k = 0; k < spec.num_pairs; ++k) {
        SceneSpec ps = spec.pair;
        ps.depth_noise = DepthNoise::none();
        ps.seed = seeds.next();
        SyntheticPair pair = generate(ps);

        colmap::Image a, b;
        a.image_id = static_cast<colmap::image_t>(2 * k + 1);
        b.image_id = static_cast<colmap::image_t>(2 * k + 2);
        a.camera_id = b.camera_id = 1;
        a.name = image_name(k, 'a');
        b.name = image_name(k, 'b');
        b.qvec = colmap::rotation_to_quaternion(pair.gt_pose.R);
        b.tvec = pair.gt_pose.t;
        const Eigen::Matrix3d Kinv = K.matrix().inverse();
        for (std::size_t i = 0; i < pair.correspondences.size(); ++i) {
            if (pair.outlier_mask[i])
                continue;
            const auto &c = pair.correspondences[i];
            colmap::Point3D pt;
            pt.point3D_id = next_point++;
            pt.xyz = pair.gt_d1[i] * (Kinv * Eigen::Vector3d(c.x1.x(), c.x1.y(), 1.0));
            pt.track = {{a.image_id, static_cast<std::uint32_t>(a.points2D.size())},
                        {b.image_id, static_cast<std::uint32_t>(b.points2D.size())}};
            a.points2D.push_back({c.x1, pt.point3D_id});
            b.points2D.push_back({c.x2, pt.point3D_id});
            model.points3D[pt.point3D_id] = std::move(pt);
        }

        ingest::MatchFile mf;
        mf.name1 = a.name;
        mf.name2 = b.name;
        for (const auto &c : pair.correspondences) {
            mf.kp1.push_back(c.x1);
            mf.kp2.push_back(c.x2);
        }
        ingest::write_matches_d2pm(mf, out.matches_dir / (ingest::pair_key(a.name, b.name) + ".d2pm"));

        for (const auto &prov : spec.provenances) {
            std::vector<Correspondence> noisy = pair.correspondences;
            Rng rng(mix64(ps.seed ^ fnv1a64(prov.name)));
            apply_depth_noise(noisy, prov.noise, rng);
            std::vector<double> d1, d2;
            for (const auto &c : noisy) {
                d1.push_back(*c.d1);
                d2.push_back(*c.d2);
            }
            const fs::path dir = out.depth_dirs.at(prov.name);
            ingest::write_pfm(sparse_depth_map(K, mf.kp1, d1), ingest::depth_map_path(dir, a.name));
            ingest::write_pfm(sparse_depth_map(K, mf.kp2, d2), ingest::depth_map_path(dir, b.name));
        }

        model.images[a.image_id] = std::move(a);
        model.images[b.image_id] = std::move(b);
        out.pairs.push_back(std::move(pair));
    }

    if (spec.binary_model)
        colmap::write_model_binary(model, out.model_dir);
    else
        colmap::write_model_text(model, out.model_dir);
    return out;
}

} // namespace mdepose::synthetic
