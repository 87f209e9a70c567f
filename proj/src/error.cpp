#include "shmcva/error.hpp"

namespace shmcva {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MissingData: return "MissingData";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::NonMonotoneTenor: return "NonMonotoneTenor";
    case ErrorCode::NonPositiveQuote: return "NonPositiveQuote";
    case ErrorCode::NonPositiveLevel: return "NonPositiveLevel";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::InsufficientQuotes: return "InsufficientQuotes";
    case ErrorCode::FitDiverged: return "FitDiverged";
    case ErrorCode::NegativeTenor: return "NegativeTenor";
    case ErrorCode::NonPositiveMaturity: return "NonPositiveMaturity";
    case ErrorCode::ReversedTimes: return "ReversedTimes";
    case ErrorCode::NonPositiveTime: return "NonPositiveTime";
    case ErrorCode::NonPositiveSpot: return "NonPositiveSpot";
    case ErrorCode::NonPositiveStep: return "NonPositiveStep";
    case ErrorCode::EmptyPath: return "EmptyPath";
    case ErrorCode::NonMonotoneSurvival: return "NonMonotoneSurvival";
    case ErrorCode::InvalidRecovery: return "InvalidRecovery";
    case ErrorCode::NotPositiveSemiDefinite: return "NotPositiveSemiDefinite";
    case ErrorCode::DegeneratePivot: return "DegeneratePivot";
    case ErrorCode::InvalidRho: return "InvalidRho";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::ExplosiveFit: return "ExplosiveFit";
    case ErrorCode::SaturatedInput: return "SaturatedInput";
    case ErrorCode::OffGridDate: return "OffGridDate";
    case ErrorCode::MaturityPassed: return "MaturityPassed";
    case ErrorCode::RootBracketFailure: return "RootBracketFailure";
    case ErrorCode::PriceUnattainable: return "PriceUnattainable";
    case ErrorCode::LikelihoodNonFinite: return "LikelihoodNonFinite";
    case ErrorCode::NonPositiveIntensityInput: return "NonPositiveIntensityInput";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code)
{
}

} // namespace shmcva
