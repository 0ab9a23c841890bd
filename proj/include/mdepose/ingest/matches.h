#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mdepose::ingest {

inline constexpr std::uint16_t kMatchFormatVersion = 1;
inline constexpr std::uint32_t kAbsentConfidence = 0xFFFFFFFFu;

// Keypoints of one image pair in native pixel coordinates. Values read
// from disk are float32 and widened exactly.
struct MatchFile {
    std::string name1;
    std::string name2;
    std::vector<Eigen::Vector2d> kp1;
    std::vector<Eigen::Vector2d> kp2;
    std::optional<std::vector<double>> confidence;

    std::size_t size() const { return kp1.size(); }
    bool operator==(const MatchFile &) const = default;
};

// `.json` files are read as {"pairs": [{"x1","y1","x2","y2","conf"?}]},
// anything else as D2PM:
//   "D2PM" | u16 version | u32 count | count x (x1 y1 x2 y2) f32
//   | u32 confidence count (count, or 0xFFFFFFFF when absent) | f32 values
// all little-endian. Throws FormatError, VersionError, IoError.
MatchFile read_matches(const std::filesystem::path &path);

void write_matches_d2pm(const MatchFile &m, const std::filesystem::path &path);
void write_matches_json(const MatchFile &m, const std::filesystem::path &path);

// `<name1>__<name2>` with '/' in image names replaced by '#'.
std::string pair_key(const std::string &name1, const std::string &name2);

} // namespace mdepose::ingest
