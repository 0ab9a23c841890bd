#include "mdepose/util/bytes.h"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mdepose {

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::kIoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw Error(ErrorCode::kIoError, "read failed: " + path.string());
    return std::move(ss).str();
}

void write_file(const std::filesystem::path &path, std::string_view contents) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::kIoError, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
        throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

void ByteReader::require(std::size_t n) const {
    if (data_.size() - pos_ < n)
        throw FormatError(source_, FormatError::ByteOffset{data_.size()},
                          "unexpected end of file (needed " + std::to_string(n) + " bytes at offset " +
                              std::to_string(pos_) + ")");
}

void ByteReader::fail(const std::string &message) const {
    throw FormatError(source_, FormatError::ByteOffset{pos_}, message);
}

std::string ByteReader::read_cstring() {
    const std::size_t end = data_.find('\0', pos_);
    if (end == std::string_view::npos)
        throw FormatError(source_, FormatError::ByteOffset{data_.size()}, "unterminated string");
    std::string s(data_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return s;
}

std::string_view ByteReader::read_bytes(std::size_t n) {
    require(n);
    std::string_view v = data_.substr(pos_, n);
    pos_ += n;
    return v;
}

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

} // namespace mdepose
