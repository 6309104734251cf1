#include "ulr/error.hpp"

namespace ulr {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::InfiniteDivergence: return "InfiniteDivergence";
        case ErrorCode::EmptyCluster: return "EmptyCluster";
        case ErrorCode::WeightMismatch: return "WeightMismatch";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::MixedPolarity: return "MixedPolarity";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InconsistentDim: return "InconsistentDim";
        case ErrorCode::RaggedRows: return "RaggedRows";
        case ErrorCode::AllOOV: return "AllOOV";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& message, std::optional<std::size_t> index) {
    std::string out(to_string(code));
    if (index) {
        out += " at index " + std::to_string(*index);
    }
    if (!message.empty()) {
        out += ": " + message;
    }
    return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string message, std::optional<std::size_t> index)
    : std::runtime_error(compose(code, message, index)), code_(code), index_(index) {}

}  // namespace ulr
