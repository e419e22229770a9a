#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sitelens {

/// Error categories used across the toolkit. Carried by sitelens::Error so
/// callers can branch on the kind of failure without string matching.
enum class ErrorCode {
    MalformedInput,
    PublicSuffixOnly,
    EmptyHost,
    ParseError,
    NonMonotonicRank,
    InsufficientPopulation,
    MissingManualLabel,
    MissingScreenshot,
    EmptyBatch,
    MalformedJson,
    MissingUrls,
    ExtraUrls,
    InvalidLabel,
    WrongCardinality,
    AuthError,
    QuotaExhausted,
    PayloadTooLarge,
    TransportError,
    PreconditionFailed,
    UnknownFingerprint,
    SchemaError,
    MissingCountryLabel,
    EmptySelection,
    DisjointKeys,
    MismatchedSeries,
    MisalignedInput,
    EmptyMatrix,
    UnknownSubset,
    BrowserLaunch,
    StoreError,
    ConfigError,
    IoError,
};

inline std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedInput: return "malformed-input";
        case ErrorCode::PublicSuffixOnly: return "public-suffix-only";
        case ErrorCode::EmptyHost: return "empty-host";
        case ErrorCode::ParseError: return "parse-error";
        case ErrorCode::NonMonotonicRank: return "non-monotonic-rank";
        case ErrorCode::InsufficientPopulation: return "insufficient-population";
        case ErrorCode::MissingManualLabel: return "missing-manual-label";
        case ErrorCode::MissingScreenshot: return "missing-screenshot";
        case ErrorCode::EmptyBatch: return "empty-batch";
        case ErrorCode::MalformedJson: return "malformed-json";
        case ErrorCode::MissingUrls: return "missing-urls";
        case ErrorCode::ExtraUrls: return "extra-urls";
        case ErrorCode::InvalidLabel: return "invalid-label";
        case ErrorCode::WrongCardinality: return "wrong-cardinality";
        case ErrorCode::AuthError: return "auth-error";
        case ErrorCode::QuotaExhausted: return "quota-exhausted";
        case ErrorCode::PayloadTooLarge: return "payload-too-large";
        case ErrorCode::TransportError: return "transport-error";
        case ErrorCode::PreconditionFailed: return "precondition-failed";
        case ErrorCode::UnknownFingerprint: return "unknown-fingerprint";
        case ErrorCode::SchemaError: return "schema-error";
        case ErrorCode::MissingCountryLabel: return "missing-country-label";
        case ErrorCode::EmptySelection: return "empty-selection";
        case ErrorCode::DisjointKeys: return "disjoint-keys";
        case ErrorCode::MismatchedSeries: return "mismatched-series";
        case ErrorCode::MisalignedInput: return "misaligned-input";
        case ErrorCode::EmptyMatrix: return "empty-matrix";
        case ErrorCode::UnknownSubset: return "unknown-subset";
        case ErrorCode::BrowserLaunch: return "browser-launch";
        case ErrorCode::StoreError: return "store-error";
        case ErrorCode::ConfigError: return "config-error";
        case ErrorCode::IoError: return "io-error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace sitelens
