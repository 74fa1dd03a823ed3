#pragma once

#include <stdexcept>

namespace intercloud {

// Contract violations. Domain-rule rejections (invalid transfers, rate
// limits, discarded ripples) are ordinary return values, not exceptions.

struct AuthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AppendOnlyViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedKey : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientEligibleNodes : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UndefinedRate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownCoin : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DuplicateRelation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AuditFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace intercloud
