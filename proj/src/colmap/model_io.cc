#include "mdepose/colmap/model_io.h"

#include <charconv>
#include <optional>
#include <spdlog/spdlog.h>
#include <sstream>

#include "mdepose/util/bytes.h"
#include "mdepose/util/error.h"

namespace mdepose::colmap {
namespace fs = std::filesystem;

namespace {

std::optional<CameraModelId> model_from_int(int id) {
    switch (id) {
    case 0:
        return CameraModelId::kSimplePinhole;
    case 1:
        return CameraModelId::kPinhole;
    case 2:
        return CameraModelId::kSimpleRadial;
    default:
        return std::nullopt;
    }
}

std::optional<CameraModelId> model_from_name(std::string_view name) {
    for (int i = 0; i < 3; ++i) {
        const auto id = *model_from_int(i);
        if (camera_model_name(id) == name)
            return id;
    }
    return std::nullopt;
}

void warn_distortion(const SfmModel &model, const std::string &source) {
    for (const auto &[id, cam] : model.cameras) {
        if (cam.model_id == CameraModelId::kSimpleRadial && cam.params.size() == 4 && cam.params[3] != 0.0)
            spdlog::warn("{}: camera {} is SIMPLE_RADIAL with k={}; distortion is ignored, images must be undistorted",
                         source, id, cam.params[3]);
    }
}

// ---------------------------------------------------------------- text

class TextLines {
  public:
    TextLines(std::string contents, std::string source) : source_(std::move(source)), in_(std::move(contents)) {}

    // Next line that is neither empty nor a comment.
    bool next_record(std::string &line) {
        while (next_raw(line)) {
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#')
                continue;
            return true;
        }
        return false;
    }

    bool next_raw(std::string &line) {
        if (!std::getline(in_, line))
            return false;
        ++line_no_;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        return true;
    }

    [[noreturn]] void fail(const std::string &message) const {
        throw FormatError(source_, FormatError::LineNumber{line_no_}, message);
    }

    const std::string &source() const { return source_; }

  private:
    std::string source_;
    std::istringstream in_;
    std::uint64_t line_no_ = 0;
};

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t')
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T> T parse_number(std::string_view tok, const TextLines &lines) {
    T value{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        lines.fail("cannot parse '" + std::string(tok) + "' as a number");
    return value;
}

void read_cameras_text(const fs::path &path, SfmModel &model) {
    TextLines lines(read_file(path), path.string());
    std::string line;
    while (lines.next_record(line)) {
        const auto tok = split_ws(line);
        if (tok.size() < 4)
            lines.fail("camera line needs CAMERA_ID MODEL WIDTH HEIGHT PARAMS[]");
        Camera cam;
        cam.camera_id = parse_number<camera_t>(tok[0], lines);
        const auto id = model_from_name(tok[1]);
        if (!id)
            throw Error(ErrorCode::kUnsupportedCameraModel, lines.source() + ": camera model " + std::string(tok[1]));
        cam.model_id = *id;
        cam.width = parse_number<std::uint64_t>(tok[2], lines);
        cam.height = parse_number<std::uint64_t>(tok[3], lines);
        for (std::size_t k = 4; k < tok.size(); ++k)
            cam.params.push_back(parse_number<double>(tok[k], lines));
        if (static_cast<int>(cam.params.size()) != camera_model_num_params(cam.model_id))
            lines.fail("wrong parameter count for " + std::string(tok[1]));
        if (!model.cameras.emplace(cam.camera_id, cam).second)
            lines.fail("duplicate camera id " + std::to_string(cam.camera_id));
    }
}

void read_images_text(const fs::path &path, SfmModel &model) {
    TextLines lines(read_file(path), path.string());
    std::string line;
    while (lines.next_record(line)) {
        const auto tok = split_ws(line);
        if (tok.size() != 10)
            lines.fail("image line needs IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME");
        Image img;
        img.image_id = parse_number<image_t>(tok[0], lines);
        for (int k = 0; k < 4; ++k)
            img.qvec(k) = parse_number<double>(tok[1 + k], lines);
        for (int k = 0; k < 3; ++k)
            img.tvec(k) = parse_number<double>(tok[5 + k], lines);
        img.camera_id = parse_number<camera_t>(tok[8], lines);
        img.name = std::string(tok[9]);

        // The observation line follows unconditionally and may be empty.
        if (!lines.next_raw(line))
            lines.fail("missing observation line for image " + std::to_string(img.image_id));
        const auto obs = split_ws(line);
        if (obs.size() % 3 != 0)
            lines.fail("observation line must hold X Y POINT3D_ID triples");
        for (std::size_t k = 0; k < obs.size(); k += 3) {
            Point2D p;
            p.xy = {parse_number<double>(obs[k], lines), parse_number<double>(obs[k + 1], lines)};
            if (obs[k + 2] == "-1")
                p.point3D_id = kInvalidPoint3DId;
            else
                p.point3D_id = parse_number<point3D_t>(obs[k + 2], lines);
            img.points2D.push_back(p);
        }
        if (!model.images.emplace(img.image_id, std::move(img)).second)
            lines.fail("duplicate image id");
    }
}

void read_points_text(const fs::path &path, SfmModel &model) {
    TextLines lines(read_file(path), path.string());
    std::string line;
    while (lines.next_record(line)) {
        const auto tok = split_ws(line);
        if (tok.size() < 8 || (tok.size() - 8) % 2 != 0)
            lines.fail("point line needs POINT3D_ID X Y Z R G B ERROR followed by (IMAGE_ID POINT2D_IDX) pairs");
        Point3D pt;
        pt.point3D_id = parse_number<point3D_t>(tok[0], lines);
        for (int k = 0; k < 3; ++k)
            pt.xyz(k) = parse_number<double>(tok[1 + k], lines);
        for (int k = 0; k < 3; ++k) {
            const int c = parse_number<int>(tok[4 + k], lines);
            if (c < 0 || c > 255)
                lines.fail("color component out of range");
            pt.color[k] = static_cast<std::uint8_t>(c);
        }
        pt.error = parse_number<double>(tok[7], lines);
        for (std::size_t k = 8; k < tok.size(); k += 2)
            pt.track.push_back({parse_number<image_t>(tok[k], lines), parse_number<std::uint32_t>(tok[k + 1], lines)});
        if (!model.points3D.emplace(pt.point3D_id, std::move(pt)).second)
            lines.fail("duplicate point id");
    }
}

// -------------------------------------------------------------- binary

void check_trailing(const ByteReader &r) {
    if (!r.at_end())
        r.fail("trailing bytes after last record");
}

void read_cameras_binary(const fs::path &path, SfmModel &model) {
    const std::string data = read_file(path);
    ByteReader r(data, path.string());
    const auto n = r.read<std::uint64_t>();
    for (std::uint64_t i = 0; i < n; ++i) {
        Camera cam;
        cam.camera_id = r.read<std::uint32_t>();
        const std::size_t model_offset = r.offset();
        const int raw_model = r.read<std::int32_t>();
        const auto id = model_from_int(raw_model);
        if (!id)
            throw Error(ErrorCode::kUnsupportedCameraModel, path.string() + " @ byte " + std::to_string(model_offset) +
                                                                ": camera model id " + std::to_string(raw_model));
        cam.model_id = *id;
        cam.width = r.read<std::uint64_t>();
        cam.height = r.read<std::uint64_t>();
        for (int k = 0; k < camera_model_num_params(cam.model_id); ++k)
            cam.params.push_back(r.read<double>());
        if (!model.cameras.emplace(cam.camera_id, cam).second)
            r.fail("duplicate camera id " + std::to_string(cam.camera_id));
    }
    check_trailing(r);
}

void read_images_binary(const fs::path &path, SfmModel &model) {
    const std::string data = read_file(path);
    ByteReader r(data, path.string());
    const auto n = r.read<std::uint64_t>();
    for (std::uint64_t i = 0; i < n; ++i) {
        Image img;
        img.image_id = r.read<std::uint32_t>();
        for (int k = 0; k < 4; ++k)
            img.qvec(k) = r.read<double>();
        for (int k = 0; k < 3; ++k)
            img.tvec(k) = r.read<double>();
        img.camera_id = r.read<std::uint32_t>();
        img.name = r.read_cstring();
        const auto n2d = r.read<std::uint64_t>();
        if (n2d > r.remaining() / 24)
            throw FormatError(r.source(), FormatError::ByteOffset{r.offset() + r.remaining()},
                              "observation count " + std::to_string(n2d) + " exceeds file size");
        img.points2D.resize(n2d);
        for (auto &p : img.points2D) {
            p.xy.x() = r.read<double>();
            p.xy.y() = r.read<double>();
            p.point3D_id = r.read<std::uint64_t>();
        }
        if (!model.images.emplace(img.image_id, std::move(img)).second)
            r.fail("duplicate image id");
    }
    check_trailing(r);
}

void read_points_binary(const fs::path &path, SfmModel &model) {
    const std::string data = read_file(path);
    ByteReader r(data, path.string());
    const auto n = r.read<std::uint64_t>();
    for (std::uint64_t i = 0; i < n; ++i) {
        Point3D pt;
        pt.point3D_id = r.read<std::uint64_t>();
        for (int k = 0; k < 3; ++k)
            pt.xyz(k) = r.read<double>();
        for (int k = 0; k < 3; ++k)
            pt.color[k] = r.read<std::uint8_t>();
        pt.error = r.read<double>();
        const auto len = r.read<std::uint64_t>();
        if (len > r.remaining() / 8)
            throw FormatError(r.source(), FormatError::ByteOffset{r.offset() + r.remaining()},
                              "track length " + std::to_string(len) + " exceeds file size");
        pt.track.resize(len);
        for (auto &e : pt.track) {
            e.image_id = r.read<std::uint32_t>();
            e.point2D_idx = r.read<std::uint32_t>();
        }
        if (!model.points3D.emplace(pt.point3D_id, std::move(pt)).second)
            r.fail("duplicate point id");
    }
    check_trailing(r);
}

bool has_files(const fs::path &dir, std::string_view ext) {
    for (const char *stem : {"cameras", "images", "points3D"})
        if (!fs::exists(dir / (std::string(stem) + std::string(ext))))
            return false;
    return true;
}

} // namespace

SfmModel read_model_text(const fs::path &dir) {
    SfmModel model;
    read_cameras_text(dir / "cameras.txt", model);
    read_images_text(dir / "images.txt", model);
    read_points_text(dir / "points3D.txt", model);
    model.validate(dir.string());
    warn_distortion(model, dir.string());
    return model;
}

SfmModel read_model_binary(const fs::path &dir) {
    SfmModel model;
    read_cameras_binary(dir / "cameras.bin", model);
    read_images_binary(dir / "images.bin", model);
    read_points_binary(dir / "points3D.bin", model);
    model.validate(dir.string());
    warn_distortion(model, dir.string());
    return model;
}

SfmModel parse_model(const fs::path &dir, ModelFormat format) {
    switch (format) {
    case ModelFormat::kText:
        return read_model_text(dir);
    case ModelFormat::kBinary:
        return read_model_binary(dir);
    case ModelFormat::kAuto:
        break;
    }
    if (has_files(dir, ".bin"))
        return read_model_binary(dir);
    if (has_files(dir, ".txt"))
        return read_model_text(dir);
    throw Error(ErrorCode::kIoError, dir.string() + ": no complete COLMAP model (cameras/images/points3D)");
}

void write_model_text(const SfmModel &model, const fs::path &dir) {
    std::string cams = "# Camera list with one line of data per camera:\n"
                       "#   CAMERA_ID, MODEL, WIDTH, HEIGHT, PARAMS[]\n"
                       "# Number of cameras: " +
                       std::to_string(model.cameras.size()) + "\n";
    for (const auto &[id, cam] : model.cameras) {
        cams += std::to_string(id) + " " + std::string(camera_model_name(cam.model_id)) + " " +
                std::to_string(cam.width) + " " + std::to_string(cam.height);
        for (double p : cam.params)
            cams += " " + format_double(p);
        cams += "\n";
    }
    write_file(dir / "cameras.txt", cams);

    std::string imgs = "# Image list with two lines of data per image:\n"
                       "#   IMAGE_ID, QW, QX, QY, QZ, TX, TY, TZ, CAMERA_ID, NAME\n"
                       "#   POINTS2D[] as (X, Y, POINT3D_ID)\n"
                       "# Number of images: " +
                       std::to_string(model.images.size()) + "\n";
    for (const auto &[id, img] : model.images) {
        imgs += std::to_string(id);
        for (int k = 0; k < 4; ++k)
            imgs += " " + format_double(img.qvec(k));
        for (int k = 0; k < 3; ++k)
            imgs += " " + format_double(img.tvec(k));
        imgs += " " + std::to_string(img.camera_id) + " " + img.name + "\n";
        for (std::size_t k = 0; k < img.points2D.size(); ++k) {
            const auto &p = img.points2D[k];
            if (k > 0)
                imgs += " ";
            imgs += format_double(p.xy.x()) + " " + format_double(p.xy.y()) + " " +
                    (p.point3D_id == kInvalidPoint3DId ? std::string("-1") : std::to_string(p.point3D_id));
        }
        imgs += "\n";
    }
    write_file(dir / "images.txt", imgs);

    std::string pts = "# 3D point list with one line of data per point:\n"
                      "#   POINT3D_ID, X, Y, Z, R, G, B, ERROR, TRACK[] as (IMAGE_ID, POINT2D_IDX)\n"
                      "# Number of points: " +
                      std::to_string(model.points3D.size()) + "\n";
    for (const auto &[id, pt] : model.points3D) {
        pts += std::to_string(id);
        for (int k = 0; k < 3; ++k)
            pts += " " + format_double(pt.xyz(k));
        for (int k = 0; k < 3; ++k)
            pts += " " + std::to_string(pt.color[k]);
        pts += " " + format_double(pt.error);
        for (const auto &e : pt.track)
            pts += " " + std::to_string(e.image_id) + " " + std::to_string(e.point2D_idx);
        pts += "\n";
    }
    write_file(dir / "points3D.txt", pts);
}

void write_model_binary(const SfmModel &model, const fs::path &dir) {
    ByteWriter cams;
    cams.write<std::uint64_t>(model.cameras.size());
    for (const auto &[id, cam] : model.cameras) {
        cams.write<std::uint32_t>(id);
        cams.write<std::int32_t>(static_cast<int>(cam.model_id));
        cams.write<std::uint64_t>(cam.width);
        cams.write<std::uint64_t>(cam.height);
        for (double p : cam.params)
            cams.write<double>(p);
    }
    write_file(dir / "cameras.bin", cams.data());

    ByteWriter imgs;
    imgs.write<std::uint64_t>(model.images.size());
    for (const auto &[id, img] : model.images) {
        imgs.write<std::uint32_t>(id);
        for (int k = 0; k < 4; ++k)
            imgs.write<double>(img.qvec(k));
        for (int k = 0; k < 3; ++k)
            imgs.write<double>(img.tvec(k));
        imgs.write<std::uint32_t>(img.camera_id);
        imgs.write_bytes(img.name);
        imgs.write<std::uint8_t>(0);
        imgs.write<std::uint64_t>(img.points2D.size());
        for (const auto &p : img.points2D) {
            imgs.write<double>(p.xy.x());
            imgs.write<double>(p.xy.y());
            imgs.write<std::uint64_t>(p.point3D_id);
        }
    }
    write_file(dir / "images.bin", imgs.data());

    ByteWriter pts;
    pts.write<std::uint64_t>(model.points3D.size());
    for (const auto &[id, pt] : model.points3D) {
        pts.write<std::uint64_t>(id);
        for (int k = 0; k < 3; ++k)
            pts.write<double>(pt.xyz(k));
        for (int k = 0; k < 3; ++k)
            pts.write<std::uint8_t>(pt.color[k]);
        pts.write<double>(pt.error);
        pts.write<std::uint64_t>(pt.track.size());
        for (const auto &e : pt.track) {
            pts.write<std::uint32_t>(e.image_id);
            pts.write<std::uint32_t>(e.point2D_idx);
        }
    }
    write_file(dir / "points3D.bin", pts.data());
}

} // namespace mdepose::colmap
