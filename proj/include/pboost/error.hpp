#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pboost {

enum class ErrorCode {
    AllZeroWeights,
    TooFewSamples,
    InsufficientNegatives,
    LengthMismatch,
    UndefinedMetric,
    NoPositives,
    DegenerateData,
    SingleClassInput,
    DimensionMismatch,
    SubsetTooLarge,
    TooFewPositives,
    TooFewNegatives,
    TooManyClusters,
    SingleCluster,
    MissingGroupIds,
    EmptyEnsemble,
    UnknownSetting,
    MalformedHeader,
    NonNumericAttribute,
    MoreThanTwoClasses,
    MalformedData,
    MissingResults,
    InvalidArgument,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable error code. Every failure raised by
/// the library is an Error.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pboost
