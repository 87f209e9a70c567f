#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shmcva {

/// Failure categories raised by the library. The CLI prints the category
/// name verbatim so scripts can match on it.
enum class ErrorCode {
    InvalidArgument,
    MissingFile,
    MissingData,
    SchemaViolation,
    NonMonotoneTenor,
    NonPositiveQuote,
    NonPositiveLevel,
    TooShort,
    InsufficientQuotes,
    FitDiverged,
    NegativeTenor,
    NonPositiveMaturity,
    ReversedTimes,
    NonPositiveTime,
    NonPositiveSpot,
    NonPositiveStep,
    EmptyPath,
    NonMonotoneSurvival,
    InvalidRecovery,
    NotPositiveSemiDefinite,
    DegeneratePivot,
    InvalidRho,
    WindowTooLarge,
    ZeroVariance,
    ExplosiveFit,
    SaturatedInput,
    OffGridDate,
    MaturityPassed,
    RootBracketFailure,
    PriceUnattainable,
    LikelihoodNonFinite,
    NonPositiveIntensityInput,
    NonFiniteState,
    GridMismatch,
    EmptyVector,
    InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace shmcva
