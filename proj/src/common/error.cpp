#include "vecdraw/error.hpp"

namespace vecdraw {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MissingCoordinate: return "MissingCoordinate";
    case ErrorCode::UnknownLetter: return "UnknownLetter";
    case ErrorCode::NonFiniteNumber: return "NonFiniteNumber";
    case ErrorCode::BadArcFlag: return "BadArcFlag";
    case ErrorCode::MalformedMarkup: return "MalformedMarkup";
    case ErrorCode::MissingViewBox: return "MissingViewBox";
    case ErrorCode::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::GradientUnsupported: return "GradientUnsupported";
    case ErrorCode::NegativeDimension: return "NegativeDimension";
    case ErrorCode::RoundedRectUnsupported: return "RoundedRectUnsupported";
    case ErrorCode::StartsWithoutMove: return "StartsWithoutMove";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::EmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorCode::ImageDecode: return "ImageDecode";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::ProviderTimeout: return "ProviderTimeout";
    case ErrorCode::ProviderMalformedResponse: return "ProviderMalformedResponse";
    case ErrorCode::MissingRequiredInput: return "MissingRequiredInput";
    case ErrorCode::GenerationInvalid: return "GenerationInvalid";
    case ErrorCode::AllCandidatesInvalid: return "AllCandidatesInvalid";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::TooFewPaths: return "TooFewPaths";
    case ErrorCode::NotEnoughRecords: return "NotEnoughRecords";
    case ErrorCode::MissingCaption: return "MissingCaption";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& message, std::optional<std::size_t> offset) {
    std::string out(to_string(code));
    if (offset) out += " at offset " + std::to_string(*offset);
    if (!message.empty()) out += ": " + message;
    return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string message, std::optional<std::size_t> offset)
    : std::runtime_error(compose(code, message, offset)), code_(code), offset_(offset),
      detail_(std::move(message)) {}

}  // namespace vecdraw
