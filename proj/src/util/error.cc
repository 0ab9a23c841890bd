#include "mdepose/util/error.h"

namespace mdepose {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::kInvalidArgument:
        return "InvalidArgument";
    case ErrorCode::kZeroBaseline:
        return "ZeroBaseline";
    case ErrorCode::kDegenerate:
        return "Degenerate";
    case ErrorCode::kNegativeDepth:
        return "NegativeDepth";
    case ErrorCode::kUndefinedDirection:
        return "UndefinedDirection";
    case ErrorCode::kCollinear:
        return "Collinear";
    case ErrorCode::kNonPositiveScale:
        return "NonPositiveScale";
    case ErrorCode::kNoCheiralSolution:
        return "NoCheiralSolution";
    case ErrorCode::kInsufficientMatches:
        return "InsufficientMatches";
    case ErrorCode::kEstimationFailed:
        return "EstimationFailed";
    case ErrorCode::kIoError:
        return "IoError";
    case ErrorCode::kFormatError:
        return "FormatError";
    case ErrorCode::kVersionError:
        return "VersionError";
    case ErrorCode::kUnsupportedCameraModel:
        return "UnsupportedCameraModel";
    case ErrorCode::kMissingImage:
        return "MissingImage";
    case ErrorCode::kNoValidPairs:
        return "NoValidPairs";
    case ErrorCode::kEmptyInput:
        return "EmptyInput";
    case ErrorCode::kEmptyMask:
        return "EmptyMask";
    case ErrorCode::kAlignmentDegenerate:
        return "AlignmentDegenerate";
    case ErrorCode::kDegenerateFit:
        return "DegenerateFit";
    case ErrorCode::kDegenerateInput:
        return "DegenerateInput";
    case ErrorCode::kEmptyGroup:
        return "EmptyGroup";
    case ErrorCode::kSpecError:
        return "SpecError";
    case ErrorCode::kConfigError:
        return "ConfigError";
    case ErrorCode::kEmptyResults:
        return "EmptyResults";
    }
    return "Unknown";
}

} // namespace mdepose
