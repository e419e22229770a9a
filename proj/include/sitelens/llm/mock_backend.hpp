#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "sitelens/core/hash.hpp"
#include "sitelens/llm/backend.hpp"
#include "sitelens/prompt/parse.hpp"

namespace sitelens::llm {

/// Deterministic in-process backend for tests and dry runs. Two modes:
///
///  - scripted: a map from prompt fingerprint (fnv1a hex of the prompt text)
///    to canned response text; unknown fingerprints are an error.
///  - planted truth: answers are generated from ground-truth labels; each
///    URL is corrupted with probability error_rate, decided purely from
///    (seed, url) so the corrupted set is reproducible and independent of
///    batching or retry order.
class MockBackend : public Backend {
public:
    explicit MockBackend(std::map<std::string, std::string> script)
        : script_(std::move(script)), config_(make_config()) {
        if (script_.empty())
            raise(ErrorCode::PreconditionFailed, "scripted mock needs a non-empty script");
    }

    MockBackend(prompt::PromptTemplate tmpl, std::map<std::string, std::string> truth,
                double error_rate, std::uint64_t seed)
        : template_(std::move(tmpl)),
          truth_(std::move(truth)),
          error_rate_(error_rate),
          seed_(seed),
          config_(make_config()) {
        if (truth_.empty())
            raise(ErrorCode::PreconditionFailed, "planted mock needs ground truth");
    }

    const BackendConfig& config() const override { return config_; }
    std::size_t calls() const { return calls_.load(); }

    CompletionResult complete(const CompletionRequest& request) override {
        calls_.fetch_add(1);
        CompletionResult result;
        result.attempts = 1;
        if (!script_.empty()) {
            auto it = script_.find(digest_hex(request.text));
            if (it == script_.end())
                raise(ErrorCode::UnknownFingerprint,
                      "no scripted response for prompt fingerprint " + digest_hex(request.text));
            result.text = it->second;
            return result;
        }
        result.text = planted_response(extract_urls(request.text));
        return result;
    }

    /// True when (seed, url) falls under error_rate.
    bool corrupted(const std::string& url) const {
        if (error_rate_ <= 0.0) return false;
        std::uint64_t h = fnv1a64(url, seed_ ^ 0x9e3779b97f4a7c15ULL);
        double u = static_cast<double>(h >> 11) * 0x1.0p-53;
        return u < error_rate_;
    }

    std::vector<std::string> corrupted_urls() const {
        std::vector<std::string> out;
        for (const auto& [url, label] : truth_)
            if (corrupted(url)) out.push_back(url);
        return out;
    }

    /// Deterministic wrong-but-in-vocabulary label for a truth label.
    std::string corrupt_label(const std::string& url, const std::string& truth) const {
        const auto& vocab = vocabulary();
        std::size_t truth_idx = 0;
        for (std::size_t i = 0; i < vocab.size(); ++i)
            if (vocab[i] == truth) truth_idx = i;
        std::uint64_t h = fnv1a64(url, seed_ ^ 0xc2b2ae3d27d4eb4fULL);
        std::size_t offset = 1 + static_cast<std::size_t>(h % (vocab.size() - 1));
        return vocab[(truth_idx + offset) % vocab.size()];
    }

private:
    static BackendConfig make_config() {
        BackendConfig config;
        config.name = "mock";
        config.endpoint_url = "http://mock.invalid";
        config.model_id = "mock";
        config.supports_images = true;
        config.max_concurrent = 8;
        return config;
    }

    /// The task vocabulary used for corruption. Country prompts accept any
    /// alpha-2 code; a small fixed palette keeps corrupted labels valid.
    std::vector<std::string> vocabulary() const {
        if (template_.task == TaskKind::Country)
            return {"US", "DE", "FR", "IT", "JP", std::string(kLabelInternational)};
        return template_.labels_vocabulary;
    }

    static std::vector<std::string> extract_urls(const std::string& text) {
        std::vector<std::string> urls;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            std::string_view line{text.data() + start, (end == std::string::npos ? text.size() : end) - start};
            line = trim(line);
            if (line.starts_with("http://") || line.starts_with("https://"))
                urls.emplace_back(line);
            if (end == std::string::npos) break;
            start = end + 1;
        }
        return urls;
    }

    std::string planted_response(const std::vector<std::string>& urls) const {
        prompt::ParsedPredictions parsed;
        for (const auto& url : urls) {
            auto it = truth_.find(url);
            if (it == truth_.end())
                raise(ErrorCode::UnknownFingerprint, "no planted truth for '" + url + "'");
            const std::string& truth = it->second;
            prompt::Prediction pred;
            std::string label = corrupted(url) ? corrupt_label(url, truth) : truth;
            pred.labels = {label};
            if (template_.task == TaskKind::Category && template_.labels_per_site == 2) {
                // Second choice: never the truth, so scoring reflects only
                // the first slot's correctness.
                pred.labels.push_back(corrupt_label(url + "#second", truth));
            }
            if (template_.task == TaskKind::Governmental && label == kLabelGov)
                pred.country = "Italy";
            parsed.by_url[url] = std::move(pred);
        }
        return prompt::serialize_predictions(parsed, template_);
    }

    std::map<std::string, std::string> script_;
    prompt::PromptTemplate template_;
    std::map<std::string, std::string> truth_;
    double error_rate_ = 0.0;
    std::uint64_t seed_ = 0;
    BackendConfig config_;
    std::atomic<std::size_t> calls_{0};
};

}  // namespace sitelens::llm
