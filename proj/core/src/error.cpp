#include "fbpr/error.hpp"

namespace fbpr {

const char* to_string(Errc code) {
    switch (code) {
    case Errc::MissingField: return "MissingField";
    case Errc::OptionCountNotFive: return "OptionCountNotFive";
    case Errc::GoldIndexOutOfRange: return "GoldIndexOutOfRange";
    case Errc::DuplicateOptions: return "DuplicateOptions";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::PlanTooLarge: return "PlanTooLarge";
    case Errc::BackendError: return "BackendError";
    case Errc::RateLimited: return "RateLimited";
    case Errc::ServiceUnavailable: return "ServiceUnavailable";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::StoreCorrupt: return "StoreCorrupt";
    case Errc::ClientError: return "ClientError";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::RuleViolation: return "RuleViolation";
    case Errc::OrderMismatch: return "OrderMismatch";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::LineFormatViolation: return "LineFormatViolation";
    case Errc::IdMismatch: return "IdMismatch";
    case Errc::IoError: return "IoError";
    case Errc::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

} // namespace fbpr
