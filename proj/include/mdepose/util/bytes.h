#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <type_traits>

#include "mdepose/util/error.h"

namespace mdepose {

// Whole-file helpers. Throw Error(kIoError).
std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::string_view contents);

// Little-endian cursor over an in-memory file. Running past the end throws
// FormatError at the truncation offset (the data size).
class ByteReader {
  public:
    ByteReader(std::string_view data, std::string source) : data_(data), source_(std::move(source)) {}

    template <typename T> T read() {
        static_assert(std::is_arithmetic_v<T>);
        using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                                     std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                        std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
        require(sizeof(T));
        U bits = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            bits |= static_cast<U>(static_cast<U>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i));
        pos_ += sizeof(T);
        return std::bit_cast<T>(bits);
    }

    // Bytes up to (not including) the next NUL; consumes the NUL.
    std::string read_cstring();
    std::string_view read_bytes(std::size_t n);

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool at_end() const { return pos_ == data_.size(); }
    const std::string &source() const { return source_; }

    [[noreturn]] void fail(const std::string &message) const;

  private:
    void require(std::size_t n) const;

    std::string_view data_;
    std::string source_;
    std::size_t pos_ = 0;
};

class ByteWriter {
  public:
    template <typename T> void write(T value) {
        static_assert(std::is_arithmetic_v<T>);
        using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                                     std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                        std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
        const U bits = std::bit_cast<U>(value);
        for (std::size_t i = 0; i < sizeof(T); ++i)
            out_.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
    void write_bytes(std::string_view bytes) { out_.append(bytes); }

    const std::string &data() const { return out_; }

  private:
    std::string out_;
};

// Decimal text that parses back to the same double ("%.17g").
std::string format_double(double value);

} // namespace mdepose
