#pragma once

#include <stdexcept>
#include <string>

namespace fbpr {

// Error identities used across the pipeline. Tests match on these codes,
// not on message text.
enum class Errc {
    MissingField,
    OptionCountNotFive,
    GoldIndexOutOfRange,
    DuplicateOptions,
    EmptyInput,
    PlanTooLarge,
    BackendError,
    RateLimited,
    ServiceUnavailable,
    MalformedResponse,
    StoreCorrupt,
    ClientError,
    CountMismatch,
    RuleViolation,
    OrderMismatch,
    UnknownLabel,
    LineFormatViolation,
    IdMismatch,
    IoError,
    ConfigError,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace fbpr
