#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sitelens/core/error.hpp"

namespace sitelens::llm {

/// Two wire dialects cover the cloud-style and locally-hosted-style
/// chat-completion APIs; further endpoints are added by config where the
/// payload shape permits.
enum class WireDialect { GeminiStyle, OpenAiCompatible };

inline WireDialect wire_dialect_from_name(std::string_view name) {
    if (name == "gemini-style") return WireDialect::GeminiStyle;
    if (name == "openai-compatible") return WireDialect::OpenAiCompatible;
    raise(ErrorCode::ConfigError, "unknown wire dialect '" + std::string(name) + "'");
}

inline std::string_view wire_dialect_name(WireDialect dialect) {
    return dialect == WireDialect::GeminiStyle ? "gemini-style" : "openai-compatible";
}

struct BackendConfig {
    std::string name;
    std::string endpoint_url;
    std::string api_key_env;  // empty: requests carry no auth header
    std::string model_id;
    WireDialect wire_dialect = WireDialect::OpenAiCompatible;
    int max_concurrent = 4;
    int requests_per_minute = 60;
    int max_retries = 3;
    std::chrono::milliseconds timeout{30000};
    bool supports_images = false;

    void validate() const {
        if (endpoint_url.empty()) raise(ErrorCode::ConfigError, "backend endpoint_url missing");
        if (max_concurrent < 1) raise(ErrorCode::ConfigError, "max_concurrent must be >= 1");
        if (requests_per_minute < 1)
            raise(ErrorCode::ConfigError, "requests_per_minute must be >= 1");
        if (max_retries < 0) raise(ErrorCode::ConfigError, "max_retries must be >= 0");
        if (timeout.count() <= 0) raise(ErrorCode::ConfigError, "timeout must be > 0");
    }
};

struct CompletionRequest {
    std::string text;
    std::vector<std::vector<std::uint8_t>> images;  // PNG blobs, in order
    double temperature = 0.0;
};

struct CompletionResult {
    std::string text;
    std::optional<std::uint64_t> input_tokens;
    std::optional<std::uint64_t> output_tokens;
    std::chrono::milliseconds latency{0};
    int attempts = 1;
};

/// Uniform chat-completion interface. Implementations must be safe to share
/// across worker threads.
class Backend {
public:
    virtual ~Backend() = default;
    virtual CompletionResult complete(const CompletionRequest& request) = 0;
    virtual const BackendConfig& config() const = 0;
};

}  // namespace sitelens::llm
