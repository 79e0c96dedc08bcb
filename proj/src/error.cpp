#include "pboost/error.hpp"

namespace pboost {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::AllZeroWeights: return "AllZeroWeights";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::InsufficientNegatives: return "InsufficientNegatives";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::UndefinedMetric: return "UndefinedMetric";
        case ErrorCode::NoPositives: return "NoPositives";
        case ErrorCode::DegenerateData: return "DegenerateData";
        case ErrorCode::SingleClassInput: return "SingleClassInput";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SubsetTooLarge: return "SubsetTooLarge";
        case ErrorCode::TooFewPositives: return "TooFewPositives";
        case ErrorCode::TooFewNegatives: return "TooFewNegatives";
        case ErrorCode::TooManyClusters: return "TooManyClusters";
        case ErrorCode::SingleCluster: return "SingleCluster";
        case ErrorCode::MissingGroupIds: return "MissingGroupIds";
        case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
        case ErrorCode::UnknownSetting: return "UnknownSetting";
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::NonNumericAttribute: return "NonNumericAttribute";
        case ErrorCode::MoreThanTwoClasses: return "MoreThanTwoClasses";
        case ErrorCode::MalformedData: return "MalformedData";
        case ErrorCode::MissingResults: return "MissingResults";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace pboost
