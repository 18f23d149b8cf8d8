#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vecdraw {

enum class ErrorCode {
    // path data / markup
    MissingCoordinate,
    UnknownLetter,
    NonFiniteNumber,
    BadArcFlag,
    MalformedMarkup,
    MissingViewBox,
    UnsupportedConstruct,
    GradientUnsupported,
    NegativeDimension,
    RoundedRectUnsupported,
    StartsWithoutMove,
    // images and metrics
    DimensionMismatch,
    TooSmall,
    EmptyCandidateSet,
    ImageDecode,
    // external providers
    ProviderUnavailable,
    ProviderTimeout,
    ProviderMalformedResponse,
    // generation / workflows
    MissingRequiredInput,
    GenerationInvalid,
    AllCandidatesInvalid,
    InvalidQuery,
    // dataset
    TooFewPaths,
    NotEnoughRecords,
    MissingCaption,
    // plumbing
    Io,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a code; parser errors also
/// carry the byte offset into the input where the problem was detected.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, std::optional<std::size_t> offset = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> offset() const noexcept { return offset_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> offset_;
    std::string detail_;
};

inline bool is_provider_error(ErrorCode code) {
    return code == ErrorCode::ProviderUnavailable || code == ErrorCode::ProviderTimeout ||
           code == ErrorCode::ProviderMalformedResponse;
}

}  // namespace vecdraw
