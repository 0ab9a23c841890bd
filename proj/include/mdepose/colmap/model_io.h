#pragma once

#include <filesystem>

#include "mdepose/colmap/model.h"

namespace mdepose::colmap {

enum class ModelFormat { kAuto, kText, kBinary };

// Reads cameras / images / points3D from `dir`. kAuto prefers the binary
// files when both are present. Throws FormatError (byte offset for binary,
// line number for text), UnsupportedCameraModel or IoError.
SfmModel parse_model(const std::filesystem::path &dir, ModelFormat format = ModelFormat::kAuto);

SfmModel read_model_text(const std::filesystem::path &dir);
SfmModel read_model_binary(const std::filesystem::path &dir);

// Writers produce files readable by COLMAP itself; text output uses 17
// significant digits so a text round trip is lossless.
void write_model_text(const SfmModel &model, const std::filesystem::path &dir);
void write_model_binary(const SfmModel &model, const std::filesystem::path &dir);

} // namespace mdepose::colmap
