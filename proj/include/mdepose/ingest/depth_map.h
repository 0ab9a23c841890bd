#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mdepose::ingest {

// Row-major, top-down depth grid. Non-finite or non-positive values are
// invalid; they are kept as read and removed later by filter_and_cap.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    float &at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    bool empty() const { return values.empty(); }
};

enum class Endianness { kLittle, kBig };

// Grayscale PFM ("Pf"). A negative scale marks little-endian payloads; rows
// are stored bottom-up in the file. Throws FormatError / IoError.
DepthMap read_pfm(const std::filesystem::path &path);
void write_pfm(const DepthMap &map, const std::filesystem::path &path, Endianness endianness = Endianness::kLittle);

// `<depth_dir>/<image name with its extension replaced by .pfm>`.
std::filesystem::path depth_map_path(const std::filesystem::path &depth_dir, const std::string &image_name);

} // namespace mdepose::ingest
