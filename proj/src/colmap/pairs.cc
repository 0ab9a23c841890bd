#include "mdepose/colmap/pairs.h"

#include <charconv>
#include <sstream>

#include "mdepose/util/bytes.h"
#include "mdepose/util/error.h"
#include "mdepose/util/random.h"

namespace mdepose::colmap {

namespace {

constexpr std::string_view kHeader = "id1,id2,name1,name2,overlap,qw,qx,qy,qz,tx,ty,tz";

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = line.find(sep, start);
        out.push_back(line.substr(start, end - start));
        if (end == std::string::npos)
            break;
        start = end + 1;
    }
    return out;
}

template <typename T> T parse_field(const std::string &tok, const std::string &source, std::uint64_t line) {
    T value{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw FormatError(source, FormatError::LineNumber{line}, "bad field '" + tok + "'");
    return value;
}

} // namespace

std::vector<ImagePair> sample_pairs(const SfmModel &model, double min_overlap, std::size_t n, std::uint64_t seed) {
    if (n == 0)
        throw Error(ErrorCode::kInvalidArgument, "sample_pairs needs n >= 1");
    std::vector<std::pair<std::pair<image_t, image_t>, double>> candidates;
    for (const auto &[key, overlap] : covisibility(model))
        if (overlap >= min_overlap)
            candidates.emplace_back(key, overlap);
    if (candidates.empty())
        throw Error(ErrorCode::kNoValidPairs, "no image pair with overlap >= " + format_double(min_overlap));

    const std::size_t take = std::min(n, candidates.size());
    Rng rng(seed);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(candidates.size() - i));
        std::swap(candidates[i], candidates[j]);
    }

    std::vector<ImagePair> pairs;
    pairs.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        const auto [ids, overlap] = candidates[i];
        ImagePair p;
        p.id1 = ids.first;
        p.id2 = ids.second;
        p.name1 = model.image(p.id1).name;
        p.name2 = model.image(p.id2).name;
        p.overlap = overlap;
        p.gt_relative_pose = gt_relative_pose(model, p.id1, p.id2);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

void write_pairs_csv(const std::vector<ImagePair> &pairs, const std::filesystem::path &path) {
    std::string out(kHeader);
    out += "\n";
    for (const auto &p : pairs) {
        if (p.name1.find_first_of(",\n") != std::string::npos || p.name2.find_first_of(",\n") != std::string::npos)
            throw Error(ErrorCode::kInvalidArgument, "image names may not contain ',' or newlines: " + p.name1 +
                                                         " / " + p.name2);
        const Eigen::Vector4d q = rotation_to_quaternion(p.gt_relative_pose.R);
        out += std::to_string(p.id1) + "," + std::to_string(p.id2) + "," + p.name1 + "," + p.name2 + "," +
               format_double(p.overlap);
        for (int k = 0; k < 4; ++k)
            out += "," + format_double(q(k));
        for (int k = 0; k < 3; ++k)
            out += "," + format_double(p.gt_relative_pose.t(k));
        out += "\n";
    }
    write_file(path, out);
}

std::vector<ImagePair> read_pairs_csv(const std::filesystem::path &path) {
    const std::string source = path.string();
    std::istringstream in(read_file(path));
    std::string line;
    std::uint64_t line_no = 0;
    std::vector<ImagePair> pairs;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line_no == 1) {
            if (line != kHeader)
                throw FormatError(source, FormatError::LineNumber{1}, "expected header '" + std::string(kHeader) + "'");
            continue;
        }
        if (line.empty())
            continue;
        const auto f = split(line, ',');
        if (f.size() != 12)
            throw FormatError(source, FormatError::LineNumber{line_no}, "expected 12 fields");
        ImagePair p;
        p.id1 = parse_field<image_t>(f[0], source, line_no);
        p.id2 = parse_field<image_t>(f[1], source, line_no);
        p.name1 = f[2];
        p.name2 = f[3];
        p.overlap = parse_field<double>(f[4], source, line_no);
        Eigen::Vector4d q;
        for (int k = 0; k < 4; ++k)
            q(k) = parse_field<double>(f[5 + k], source, line_no);
        p.gt_relative_pose.R = quaternion_to_rotation(q);
        for (int k = 0; k < 3; ++k)
            p.gt_relative_pose.t(k) = parse_field<double>(f[9 + k], source, line_no);
        pairs.push_back(std::move(p));
    }
    if (line_no == 0)
        throw FormatError(source, FormatError::LineNumber{1}, "empty file");
    return pairs;
}

} // namespace mdepose::colmap
