#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ulr {

enum class ErrorCode {
    DimensionMismatch,
    EmptyInput,
    LabelOutOfRange,
    NonFinite,
    DuplicateId,
    InvalidArgument,
    ZeroVector,
    InfiniteDivergence,
    EmptyCluster,
    WeightMismatch,
    KTooLarge,
    LengthMismatch,
    ShapeMismatch,
    MixedPolarity,
    ParseError,
    InconsistentDim,
    RaggedRows,
    AllOOV,
    IoError,
};

std::string_view to_string(ErrorCode code);

// All recoverable failures in the library surface as ulr::Error. `index` names
// the offending row/position/line when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, std::optional<std::size_t> index = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> index_;
};

}  // namespace ulr
