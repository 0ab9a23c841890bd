#include <gtest/gtest.h>
#include <set>

#include "mdepose/colmap/model_io.h"
#include "mdepose/colmap/pairs.h"
#include "mdepose/util/bytes.h"
#include "test_support.h"

using namespace mdepose;
using namespace mdepose::colmap;

namespace {

const std::filesystem::path kSmall = std::filesystem::path(MDEPOSE_FIXTURE_DIR) / "colmap_small";

// Model whose image i observes exactly the listed 3D point ids.
SfmModel model_from_visibility(const std::vector<std::vector<point3D_t>> &observed) {
    SfmModel m;
    m.cameras[1] = {1, CameraModelId::kPinhole, 640, 480, {500.0, 500.0, 320.0, 240.0}};
    for (std::size_t i = 0; i < observed.size(); ++i) {
        Image im;
        im.image_id = static_cast<image_t>(i + 1);
        im.camera_id = 1;
        im.name = "img" + std::to_string(i + 1) + ".jpg";
        im.tvec = Eigen::Vector3d(static_cast<double>(i), 0.0, 0.0);
        for (point3D_t p : observed[i]) {
            auto &pt = m.points3D[p];
            pt.point3D_id = p;
            pt.xyz = Eigen::Vector3d(0.0, 0.0, 5.0 + static_cast<double>(p));
            pt.track.push_back({im.image_id, static_cast<std::uint32_t>(im.points2D.size())});
            im.points2D.push_back({Eigen::Vector2d(10.0 * p, 5.0), p});
        }
        m.images[im.image_id] = im;
    }
    return m;
}

std::vector<point3D_t> range(point3D_t a, point3D_t b) {
    std::vector<point3D_t> out;
    for (point3D_t p = a; p < b; ++p)
        out.push_back(p);
    return out;
}

SfmModel random_model(std::mt19937_64 &gen, int n_images, int n_points) {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::uniform_int_distribution<int> pick(0, n_images - 1);
    SfmModel m;
    m.cameras[1] = {1, CameraModelId::kPinhole, 1024, 768, {u(gen) + 800, u(gen) + 800, 512.25, 384.5}};
    m.cameras[2] = {2, CameraModelId::kSimplePinhole, 640, 480, {600.125, 320.0, 240.0}};
    m.cameras[3] = {3, CameraModelId::kSimpleRadial, 640, 480, {610.0, 321.0, 239.0, 0.0}};
    for (int i = 0; i < n_images; ++i) {
        Image im;
        im.image_id = static_cast<image_t>(i + 1);
        im.camera_id = static_cast<camera_t>(1 + i % 3);
        im.name = "dir/frame_" + std::to_string(i) + ".png";
        im.qvec = rotation_to_quaternion(test::random_rotation(gen));
        im.tvec = Eigen::Vector3d(u(gen), u(gen), u(gen));
        im.points2D.push_back({Eigen::Vector2d(u(gen) + 100, u(gen) + 100), kInvalidPoint3DId});
        m.images[im.image_id] = im;
    }
    for (int p = 0; p < n_points; ++p) {
        Point3D pt;
        pt.point3D_id = static_cast<point3D_t>(p + 1);
        pt.xyz = Eigen::Vector3d(u(gen), u(gen), u(gen));
        pt.color = {static_cast<std::uint8_t>(p % 256), 7, 200};
        pt.error = std::abs(u(gen));
        std::set<image_t> seen;
        const int len = 2 + p % 3;
        while (static_cast<int>(seen.size()) < std::min(len, n_images))
            seen.insert(static_cast<image_t>(pick(gen) + 1));
        for (image_t id : seen) {
            auto &im = m.images[id];
            pt.track.push_back({id, static_cast<std::uint32_t>(im.points2D.size())});
            im.points2D.push_back({Eigen::Vector2d(u(gen) + 300, u(gen) + 200), pt.point3D_id});
        }
        m.points3D[pt.point3D_id] = pt;
    }
    return m;
}

} // namespace

TEST(ColmapText, ParsesHandcraftedFixture) {
    const auto m = parse_model(kSmall, ModelFormat::kText);
    EXPECT_EQ(m.cameras.size(), 2u);
    EXPECT_EQ(m.images.size(), 3u);
    EXPECT_EQ(m.points3D.size(), 4u);
    EXPECT_EQ(m.cameras.at(2).model_id, CameraModelId::kSimplePinhole);
    const auto K2 = m.cameras.at(2).intrinsics();
    EXPECT_EQ(K2.fx, 700.0);
    EXPECT_EQ(K2.fy, 700.0);
    EXPECT_EQ(K2.width, 800);
    EXPECT_EQ(m.image(3).name, "sub/c.png");
    EXPECT_EQ(m.image(1).points2D.size(), 4u);
    EXPECT_EQ(m.image(1).points2D[3].point3D_id, kInvalidPoint3DId);
    EXPECT_EQ(m.image(1).points2D[0].xy, Eigen::Vector2d(100.5, 200.25));
    EXPECT_EQ(m.points3D.at(1).track.size(), 3u);
    EXPECT_EQ(m.points3D.at(4).color, (std::array<std::uint8_t, 3>{10, 20, 30}));
    EXPECT_EQ(m.intrinsics_of(1).fy, 510.0);
    EXPECT_THROW(m.image(99), Error);
}

TEST(ColmapBinary, MatchesTextParseFieldForField) {
    test::TempDir dir;
    const auto text = parse_model(kSmall, ModelFormat::kText);
    write_model_binary(text, dir.path());
    const auto binary = parse_model(dir.path(), ModelFormat::kBinary);
    EXPECT_EQ(binary, text);
}

TEST(ColmapIo, RandomModelsRoundTrip) {
    std::mt19937_64 gen(51);
    for (int trial = 0; trial < 5; ++trial) {
        const auto m = random_model(gen, 12, 60);
        m.validate("generated");
        test::TempDir text_dir, bin_dir;
        write_model_text(m, text_dir.path());
        write_model_binary(m, bin_dir.path());
        EXPECT_EQ(read_model_text(text_dir.path()), m);
        EXPECT_EQ(read_model_binary(bin_dir.path()), m);
    }
}

TEST(ColmapIo, AutoPrefersBinary) {
    test::TempDir dir;
    auto m = parse_model(kSmall);
    write_model_text(m, dir.path());
    m.images.at(1).name = "binary.png";
    write_model_binary(m, dir.path());
    EXPECT_EQ(parse_model(dir.path()).image(1).name, "binary.png");
    EXPECT_EQ(parse_model(dir.path(), ModelFormat::kText).image(1).name, "a.png");
}

TEST(ColmapBinary, TruncatedFileReportsOffset) {
    test::TempDir dir;
    write_model_binary(parse_model(kSmall), dir.path());
    const auto path = dir / "images.bin";
    const std::string full = read_file(path);
    for (std::size_t cut : {std::size_t(3), full.size() / 2, full.size() - 1}) {
        write_file(path, full.substr(0, cut));
        try {
            read_model_binary(dir.path());
            FAIL() << "cut " << cut;
        } catch (const FormatError &e) {
            ASSERT_TRUE(e.byte_offset().has_value());
            EXPECT_EQ(*e.byte_offset(), cut);
        }
    }
}

TEST(ColmapText, ErrorsCarryLineNumbers) {
    test::TempDir dir;
    for (const char *f : {"cameras.txt", "images.txt", "points3D.txt"})
        std::filesystem::copy_file(kSmall / f, dir / f);
    write_file(dir / "cameras.txt", "# header\n1 PINHOLE 640 480 500 510 320\n");
    try {
        read_model_text(dir.path());
        FAIL();
    } catch (const FormatError &e) {
        EXPECT_EQ(e.line(), 2u);
    }
    write_file(dir / "cameras.txt", "1 OPENCV 640 480 500 510 320 240 0 0 0 0\n");
    try {
        read_model_text(dir.path());
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kUnsupportedCameraModel);
    }
}

TEST(ColmapModel, InconsistentTrackRejected) {
    auto m = parse_model(kSmall);
    m.points3D.at(2).track.pop_back();
    EXPECT_THROW(m.validate("edited"), FormatError);
    auto n = parse_model(kSmall);
    n.images.at(3).camera_id = 9;
    EXPECT_THROW(n.validate("edited"), FormatError);
}

TEST(Quaternion, RoundTrip) {
    std::mt19937_64 gen(52);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Matrix3d R = test::random_rotation(gen);
        const Eigen::Vector4d q = rotation_to_quaternion(R);
        EXPECT_GE(q(0), 0.0);
        EXPECT_NEAR(q.norm(), 1.0, 1e-14);
        EXPECT_LT((quaternion_to_rotation(q) - R).norm(), 1e-12);
        const Eigen::Quaterniond e(q(0), q(1), q(2), q(3));
        EXPECT_LT((e.toRotationMatrix() - R).norm(), 1e-12);
    }
}

TEST(GtRelativePose, SameImageIsIdentity) {
    const auto m = parse_model(kSmall);
    const Pose p = gt_relative_pose(m, 2, 2);
    EXPECT_LT((p.R - Eigen::Matrix3d::Identity()).norm(), 1e-15);
    EXPECT_LT(p.t.norm(), 1e-15);
    EXPECT_THROW(gt_relative_pose(m, 1, 42), Error);
}

TEST(GtRelativePose, TranslatedCamera) {
    SfmModel m = model_from_visibility({{1}, {1}});
    // Camera 2 centre at world (1, 0, 0): t2 = -R2 C2.
    m.images.at(1).tvec = Eigen::Vector3d::Zero();
    m.images.at(2).tvec = Eigen::Vector3d(-1.0, 0.0, 0.0);
    const Pose rel = gt_relative_pose(m, 1, 2);
    EXPECT_LT((rel.t - Eigen::Vector3d(-1.0, 0.0, 0.0)).norm(), 1e-15);
    const Eigen::Vector3d Xw(0.3, 0.4, 5.0);
    const Eigen::Vector3d X1 = m.image(1).world_to_camera().apply(Xw);
    const Eigen::Vector3d X2 = m.image(2).world_to_camera().apply(Xw);
    EXPECT_LT((rel.apply(X1) - X2).norm(), 1e-15);
}

TEST(GtRelativePose, TransportsWorldPoints) {
    std::mt19937_64 gen(53);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
        SfmModel m = model_from_visibility({{1}, {1}});
        const Eigen::Matrix3d R1 = test::random_rotation(gen), R2 = test::random_rotation(gen);
        m.images.at(1).qvec = rotation_to_quaternion(R1);
        m.images.at(2).qvec = rotation_to_quaternion(R2);
        m.images.at(1).tvec = Eigen::Vector3d(u(gen), u(gen), u(gen));
        m.images.at(2).tvec = Eigen::Vector3d(u(gen), u(gen), u(gen));
        const Pose rel = gt_relative_pose(m, 1, 2);
        for (int k = 0; k < 100; ++k) {
            const Eigen::Vector3d Xw(u(gen), u(gen), u(gen));
            const Eigen::Vector3d via1 = R1 * Xw + m.images.at(1).tvec;
            const Eigen::Vector3d via2 = R2 * Xw + m.images.at(2).tvec;
            EXPECT_LT((rel.R * via1 + rel.t - via2).norm(), 1e-10);
        }
    }
}

TEST(Covisibility, HandCountedFixtures) {
    const auto small = covisibility(parse_model(kSmall));
    ASSERT_EQ(small.size(), 3u);
    for (const auto &[key, v] : small)
        EXPECT_DOUBLE_EQ(v, 2.0 / 3.0);

    // |P1| = 10, |P2| = 4, shared 2 -> 2 / 4.
    auto p2 = range(1, 3);
    p2.push_back(20);
    p2.push_back(21);
    const auto cov = covisibility(model_from_visibility({range(1, 11), p2, range(1, 11), {30, 31}}));
    EXPECT_DOUBLE_EQ(cov.at({1, 2}), 0.5);
    EXPECT_DOUBLE_EQ(cov.at({1, 3}), 1.0);
    EXPECT_EQ(cov.count({1, 4}), 0u);
    EXPECT_EQ(cov.count({2, 4}), 0u);
}

TEST(SamplePairs, FewerAvailableThanRequested) {
    const auto model = model_from_visibility({range(1, 6), range(1, 6), range(1, 6)});
    const auto pairs = sample_pairs(model, 0.1, 10, 3);
    ASSERT_EQ(pairs.size(), 3u);
    std::set<std::pair<image_t, image_t>> keys;
    for (const auto &p : pairs) {
        EXPECT_LT(p.id1, p.id2);
        EXPECT_EQ(p.overlap, 1.0);
        keys.insert({p.id1, p.id2});
    }
    EXPECT_EQ(keys.size(), 3u);
}

TEST(SamplePairs, DeterministicAndSeedDependent) {
    std::mt19937_64 gen(54);
    const auto model = random_model(gen, 30, 400);
    const auto a = sample_pairs(model, 0.05, 20, 7);
    const auto b = sample_pairs(model, 0.05, 20, 7);
    const auto c = sample_pairs(model, 0.05, 20, 8);
    ASSERT_EQ(a.size(), b.size());
    bool differs = a.size() != c.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].id1, b[i].id1);
        EXPECT_EQ(a[i].id2, b[i].id2);
        if (i < c.size())
            differs |= a[i].id1 != c[i].id1 || a[i].id2 != c[i].id2;
    }
    EXPECT_TRUE(differs);
}

TEST(SamplePairs, InclusiveThresholdAndNoValidPairs) {
    auto p2 = range(1, 3);
    p2.push_back(20);
    p2.push_back(21);
    const auto model = model_from_visibility({range(1, 11), p2});
    EXPECT_EQ(sample_pairs(model, 0.5, 5, 0).size(), 1u);
    try {
        sample_pairs(model, 0.5000001, 5, 0);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kNoValidPairs);
    }
}

TEST(SamplePairs, CsvRoundTrip) {
    test::TempDir dir;
    const auto model = parse_model(kSmall);
    const auto pairs = sample_pairs(model, 0.1, 3, 11);
    write_pairs_csv(pairs, dir / "pairs.csv");
    const auto back = read_pairs_csv(dir / "pairs.csv");
    ASSERT_EQ(back.size(), pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        EXPECT_EQ(back[i].id1, pairs[i].id1);
        EXPECT_EQ(back[i].name2, pairs[i].name2);
        EXPECT_EQ(back[i].overlap, pairs[i].overlap);
        EXPECT_LT((back[i].gt_relative_pose.R - pairs[i].gt_relative_pose.R).norm(), 1e-14);
        EXPECT_EQ(back[i].gt_relative_pose.t, pairs[i].gt_relative_pose.t);
    }
    EXPECT_EQ(read_file(dir / "pairs.csv").substr(0, 44), "id1,id2,name1,name2,overlap,qw,qx,qy,qz,tx,t");
}
