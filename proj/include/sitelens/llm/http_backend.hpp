#pragma once

#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <random>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "sitelens/core/base64.hpp"
#include "sitelens/core/url.hpp"
#include "sitelens/llm/backend.hpp"
#include "sitelens/llm/rate_limit.hpp"

namespace sitelens::llm {

/// Chat completion over HTTP(S) in one of the two wire dialects, with a
/// shared rate limiter, a concurrency bound and retrying on 429/5xx and
/// transport failures. Shareable across worker threads.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(BackendConfig config)
        : config_(std::move(config)),
          limiter_(static_cast<std::size_t>(config_.requests_per_minute),
                   std::chrono::milliseconds(60000)),
          jitter_rng_(std::random_device{}()) {
        config_.validate();
        auto parts = parse_url(config_.endpoint_url);
        client_base_ = parts.scheme + "://" + parts.host;
        if (!parts.port.empty()) client_base_ += ":" + parts.port;
        base_path_ = parts.path_etc;
        while (base_path_.size() > 1 && base_path_.back() == '/') base_path_.pop_back();
        if (base_path_ == "/") base_path_.clear();
    }

    const BackendConfig& config() const override { return config_; }

    /// Test knob: retry pacing.
    BackoffPolicy& backoff() { return backoff_; }

    CompletionResult complete(const CompletionRequest& request) override {
        if (!request.images.empty() && !config_.supports_images)
            raise(ErrorCode::PreconditionFailed,
                  "backend '" + config_.name + "' does not support images");

        ConcurrencySlot slot(*this);
        std::string api_key = resolve_api_key();
        auto [path, body, headers] = build_request(request, api_key);

        int attempt = 0;
        while (true) {
            ++attempt;
            limiter_.acquire();
            auto start = std::chrono::steady_clock::now();
            httplib::Client client(client_base_);
            configure_client(client);
            auto res = client.Post(path, headers, body, "application/json");
            auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start);

            std::string failure;
            bool retryable = false;
            bool quota = false;
            if (!res) {
                failure = "transport: " + httplib::to_string(res.error());
                retryable = true;
            } else if (res->status == 200) {
                auto result = parse_response(res->body);
                result.latency = elapsed;
                result.attempts = attempt;
                return result;
            } else if (res->status == 401 || res->status == 403) {
                raise(ErrorCode::AuthError, "backend '" + config_.name + "' returned HTTP " +
                                                std::to_string(res->status));
            } else if (res->status == 413) {
                raise(ErrorCode::PayloadTooLarge,
                      "backend '" + config_.name + "' rejected the payload (HTTP 413)");
            } else if (res->status == 429 || res->status >= 500) {
                failure = "HTTP " + std::to_string(res->status);
                retryable = true;
                quota = res->status == 429;
            } else {
                raise(ErrorCode::TransportError,
                      "backend '" + config_.name + "' returned HTTP " +
                          std::to_string(res->status) + ": " + res->body.substr(0, 200));
            }

            if (!retryable || attempt > config_.max_retries) {
                auto code = quota ? ErrorCode::QuotaExhausted : ErrorCode::TransportError;
                raise(code, "backend '" + config_.name + "' failed after " +
                                std::to_string(attempt) + " attempts (" + failure + ")");
            }
            std::chrono::milliseconds pause;
            {
                std::lock_guard lock(rng_mutex_);
                pause = backoff_.with_jitter(attempt, jitter_rng_);
            }
            std::this_thread::sleep_for(pause);
        }
    }

private:
    class ConcurrencySlot {
    public:
        explicit ConcurrencySlot(HttpBackend& owner) : owner_(owner) {
            std::unique_lock lock(owner_.flight_mutex_);
            owner_.flight_cv_.wait(lock, [&] {
                return owner_.in_flight_ < owner_.config_.max_concurrent;
            });
            ++owner_.in_flight_;
        }
        ~ConcurrencySlot() {
            {
                std::lock_guard lock(owner_.flight_mutex_);
                --owner_.in_flight_;
            }
            owner_.flight_cv_.notify_one();
        }

    private:
        HttpBackend& owner_;
    };

    std::string resolve_api_key() const {
        if (config_.api_key_env.empty()) return {};
        const char* value = std::getenv(config_.api_key_env.c_str());
        if (value == nullptr || *value == '\0')
            raise(ErrorCode::AuthError,
                  "environment variable '" + config_.api_key_env + "' is not set");
        return value;
    }

    void configure_client(httplib::Client& client) const {
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
        auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout) -
                     std::chrono::duration_cast<std::chrono::microseconds>(secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
    }

    std::tuple<std::string, std::string, httplib::Headers> build_request(
        const CompletionRequest& request, const std::string& api_key) const {
        nlohmann::json payload;
        std::string path;
        httplib::Headers headers;
        if (config_.wire_dialect == WireDialect::GeminiStyle) {
            nlohmann::json parts = nlohmann::json::array();
            parts.push_back({{"text", request.text}});
            for (const auto& image : request.images)
                parts.push_back({{"inline_data",
                                  {{"mime_type", "image/png"}, {"data", base64_encode(image)}}}});
            payload = {{"contents", nlohmann::json::array({nlohmann::json{
                           {"role", "user"}, {"parts", parts}}})},
                       {"generationConfig", {{"temperature", request.temperature}}}};
            path = base_path_ + "/models/" + config_.model_id + ":generateContent";
            if (!api_key.empty()) headers.emplace("x-goog-api-key", api_key);
        } else {
            nlohmann::json content;
            if (request.images.empty()) {
                content = request.text;
            } else {
                content = nlohmann::json::array();
                content.push_back({{"type", "text"}, {"text", request.text}});
                for (const auto& image : request.images)
                    content.push_back(
                        {{"type", "image_url"},
                         {"image_url",
                          {{"url", "data:image/png;base64," + base64_encode(image)}}}});
            }
            payload = {{"model", config_.model_id},
                       {"temperature", request.temperature},
                       {"messages", nlohmann::json::array({nlohmann::json{
                           {"role", "user"}, {"content", content}}})}};
            path = base_path_ + "/chat/completions";
            if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
        }
        return {path, payload.dump(), headers};
    }

    CompletionResult parse_response(const std::string& body) const {
        nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
        if (j.is_discarded())
            raise(ErrorCode::TransportError,
                  "backend '" + config_.name + "' returned non-JSON body");
        CompletionResult result;
        try {
            if (config_.wire_dialect == WireDialect::GeminiStyle) {
                for (const auto& part : j.at("candidates").at(0).at("content").at("parts"))
                    if (part.contains("text")) result.text += part["text"].get<std::string>();
                if (j.contains("usageMetadata")) {
                    const auto& usage = j["usageMetadata"];
                    if (usage.contains("promptTokenCount"))
                        result.input_tokens = usage["promptTokenCount"].get<std::uint64_t>();
                    if (usage.contains("candidatesTokenCount"))
                        result.output_tokens = usage["candidatesTokenCount"].get<std::uint64_t>();
                }
            } else {
                result.text =
                    j.at("choices").at(0).at("message").at("content").get<std::string>();
                if (j.contains("usage")) {
                    const auto& usage = j["usage"];
                    if (usage.contains("prompt_tokens"))
                        result.input_tokens = usage["prompt_tokens"].get<std::uint64_t>();
                    if (usage.contains("completion_tokens"))
                        result.output_tokens = usage["completion_tokens"].get<std::uint64_t>();
                }
            }
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::TransportError,
                  "backend '" + config_.name + "' response shape: " + e.what());
        }
        return result;
    }

    BackendConfig config_;
    std::string client_base_;
    std::string base_path_;
    SlidingWindowLimiter limiter_;
    BackoffPolicy backoff_;
    std::mutex rng_mutex_;
    std::mt19937_64 jitter_rng_;
    std::mutex flight_mutex_;
    std::condition_variable flight_cv_;
    int in_flight_ = 0;
};

}  // namespace sitelens::llm
