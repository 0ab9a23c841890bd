#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace mdepose {

enum class ErrorCode {
    kInvalidArgument,
    // geometry
    kZeroBaseline,
    kDegenerate,
    kNegativeDepth,
    kUndefinedDirection,
    // solvers
    kCollinear,
    kNonPositiveScale,
    kNoCheiralSolution,
    // robust estimation
    kInsufficientMatches,
    kEstimationFailed,
    // io
    kIoError,
    kFormatError,
    kVersionError,
    kUnsupportedCameraModel,
    kMissingImage,
    kNoValidPairs,
    // metrics
    kEmptyInput,
    kEmptyMask,
    kAlignmentDegenerate,
    kDegenerateFit,
    kDegenerateInput,
    kEmptyGroup,
    // harness
    kSpecError,
    kConfigError,
    kEmptyResults,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

// Parse failure with the position where it was detected. Binary readers set
// the byte offset, text readers the 1-based line number.
class FormatError : public Error {
  public:
    struct ByteOffset {
        std::uint64_t value;
    };
    struct LineNumber {
        std::uint64_t value;
    };

    FormatError(const std::string &file, ByteOffset offset, const std::string &message)
        : Error(ErrorCode::kFormatError, file + " @ byte " + std::to_string(offset.value) + ": " + message),
          byte_offset_(offset.value) {}
    FormatError(const std::string &file, LineNumber line, const std::string &message)
        : Error(ErrorCode::kFormatError, file + " @ line " + std::to_string(line.value) + ": " + message),
          line_(line.value) {}
    FormatError(const std::string &file, const std::string &message)
        : Error(ErrorCode::kFormatError, file + ": " + message) {}

    std::optional<std::uint64_t> byte_offset() const { return byte_offset_; }
    std::optional<std::uint64_t> line() const { return line_; }

  private:
    std::optional<std::uint64_t> byte_offset_;
    std::optional<std::uint64_t> line_;
};

// Value-or-error return for operations whose failures are part of normal
// control flow (degenerate samples inside RANSAC and the like).
template <typename T> class Result {
  public:
    Result(T value) : data_(std::move(value)) {}
    Result(Error error) : data_(std::move(error)) {}
    Result(ErrorCode code, const std::string &message) : data_(Error(code, message)) {}

    bool ok() const { return std::holds_alternative<T>(data_); }
    explicit operator bool() const { return ok(); }

    const T &value() const & {
        if (!ok())
            throw std::get<Error>(data_);
        return std::get<T>(data_);
    }
    T &value() & {
        if (!ok())
            throw std::get<Error>(data_);
        return std::get<T>(data_);
    }
    T &&value() && {
        if (!ok())
            throw std::get<Error>(data_);
        return std::get<T>(std::move(data_));
    }

    const T &operator*() const & { return value(); }
    const T *operator->() const { return &value(); }

    const Error &error() const { return std::get<Error>(data_); }
    ErrorCode code() const { return error().code(); }

  private:
    std::variant<T, Error> data_;
};

} // namespace mdepose
