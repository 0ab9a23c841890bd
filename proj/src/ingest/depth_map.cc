#include "mdepose/ingest/depth_map.h"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>

#include "mdepose/util/bytes.h"
#include "mdepose/util/error.h"

namespace mdepose::ingest {

namespace {

// Header token scanner; PFM allows any whitespace between header fields.
class HeaderScanner {
  public:
    HeaderScanner(std::string_view data, std::string source) : data_(data), source_(std::move(source)) {}

    std::string_view token() {
        while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_])))
            ++pos_;
        const std::size_t start = pos_;
        while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_])))
            ++pos_;
        if (start == pos_)
            fail("truncated header");
        return data_.substr(start, pos_ - start);
    }

    template <typename T> T number() {
        const std::size_t at = pos_;
        const auto tok = token();
        T v{};
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            throw FormatError(source_, FormatError::ByteOffset{at}, "bad header field '" + std::string(tok) + "'");
        return v;
    }

    // The header ends with exactly one whitespace byte.
    std::size_t payload_start() {
        if (pos_ >= data_.size() || !std::isspace(static_cast<unsigned char>(data_[pos_])))
            fail("missing header terminator");
        return pos_ + 1;
    }

    [[noreturn]] void fail(const std::string &msg) const {
        throw FormatError(source_, FormatError::ByteOffset{pos_}, msg);
    }

  private:
    std::string_view data_;
    std::string source_;
    std::size_t pos_ = 0;
};

} // namespace

DepthMap read_pfm(const std::filesystem::path &path) {
    const std::string data = read_file(path);
    const std::string source = path.string();
    HeaderScanner h(data, source);
    const auto magic = h.token();
    if (magic == "PF")
        throw FormatError(source, FormatError::ByteOffset{0}, "color PFM (PF) is not a depth map");
    if (magic != "Pf")
        throw FormatError(source, FormatError::ByteOffset{0}, "bad magic '" + std::string(magic) + "'");
    const int width = h.number<int>();
    const int height = h.number<int>();
    const double scale = h.number<double>();
    if (width <= 0 || height <= 0)
        h.fail("non-positive dimensions");
    if (scale == 0.0)
        h.fail("scale must be non-zero");
    const std::size_t start = h.payload_start();

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const std::size_t expected = count * 4;
    if (data.size() - start != expected)
        throw FormatError(source, FormatError::ByteOffset{data.size()},
                          "payload has " + std::to_string(data.size() - start) + " bytes, expected " +
                              std::to_string(expected));

    const bool little = scale < 0.0;
    DepthMap map;
    map.width = width;
    map.height = height;
    map.values.resize(count);
    for (int row = 0; row < height; ++row) {
        const int y = height - 1 - row;
        for (int x = 0; x < width; ++x) {
            const unsigned char *b =
                reinterpret_cast<const unsigned char *>(data.data()) + start + (static_cast<std::size_t>(row) * width + x) * 4;
            const std::uint32_t bits =
                little ? (std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24)
                       : (std::uint32_t(b[3]) | std::uint32_t(b[2]) << 8 | std::uint32_t(b[1]) << 16 | std::uint32_t(b[0]) << 24);
            map.at(x, y) = std::bit_cast<float>(bits);
        }
    }
    return map;
}

void write_pfm(const DepthMap &map, const std::filesystem::path &path, Endianness endianness) {
    if (map.width <= 0 || map.height <= 0 ||
        map.values.size() != static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height))
        throw Error(ErrorCode::kInvalidArgument, "depth map size does not match its dimensions");
    const bool little = endianness == Endianness::kLittle;
    std::string out = "Pf\n" + std::to_string(map.width) + " " + std::to_string(map.height) + "\n" +
                      (little ? "-1.0" : "1.0") + "\n";
    out.reserve(out.size() + map.values.size() * 4);
    for (int y = map.height - 1; y >= 0; --y) {
        for (int x = 0; x < map.width; ++x) {
            const auto bits = std::bit_cast<std::uint32_t>(map.at(x, y));
            for (int k = 0; k < 4; ++k) {
                const int shift = little ? 8 * k : 8 * (3 - k);
                out.push_back(static_cast<char>((bits >> shift) & 0xff));
            }
        }
    }
    write_file(path, out);
}

std::filesystem::path depth_map_path(const std::filesystem::path &depth_dir, const std::string &image_name) {
    return depth_dir / std::filesystem::path(image_name).replace_extension(".pfm");
}

} // namespace mdepose::ingest
