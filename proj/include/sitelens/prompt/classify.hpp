#pragma once

#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "sitelens/dataset/manifest.hpp"
#include "sitelens/eval/metrics.hpp"
#include "sitelens/llm/backend.hpp"
#include "sitelens/prompt/parse.hpp"
#include "sitelens/prompt/render.hpp"

namespace sitelens::prompt {

/// Append-only JSON Lines store of per-URL predictions. Each line is
/// {url, task, labels[], raw_response_digest, backend, template_hash};
/// unclassified records carry an empty labels list and a reason. Appends are
/// flushed immediately so an interrupted run resumes where it stopped;
/// finalize() rewrites the file in a canonical order once a run completes.
class PredictionStore {
public:
    explicit PredictionStore(std::string path) : path_(std::move(path)) {
        std::ifstream in(path_, std::ios::binary);
        if (!in) return;
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object() || !j.contains("url"))
                raise(ErrorCode::StoreError, "corrupt prediction store line in '" + path_ + "'");
            lines_[j["url"].get<std::string>()] = j;
        }
    }

    bool contains(const std::string& url) const {
        std::lock_guard lock(mutex_);
        return lines_.count(url) > 0;
    }

    void append_prediction(const std::string& url, TaskKind task,
                           const std::vector<std::string>& labels,
                           const std::string& raw_response_digest, const std::string& backend,
                           const std::string& template_hash) {
        nlohmann::json j{{"url", url},
                         {"task", std::string(task_name(task))},
                         {"labels", labels},
                         {"raw_response_digest", raw_response_digest},
                         {"backend", backend},
                         {"template_hash", template_hash}};
        write_line(url, std::move(j));
    }

    void append_unclassified(const std::string& url, TaskKind task, const std::string& reason,
                             const std::string& backend, const std::string& template_hash) {
        nlohmann::json j{{"url", url},
                         {"task", std::string(task_name(task))},
                         {"labels", nlohmann::json::array()},
                         {"unclassified_reason", reason},
                         {"backend", backend},
                         {"template_hash", template_hash}};
        write_line(url, std::move(j));
    }

    /// Classified predictions only (url -> ordered labels).
    eval::PredictionMap predictions() const {
        std::lock_guard lock(mutex_);
        eval::PredictionMap out;
        for (const auto& [url, j] : lines_) {
            auto labels = j["labels"].get<std::vector<std::string>>();
            if (!labels.empty()) out[url] = std::move(labels);
        }
        return out;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return lines_.size();
    }

    std::size_t unclassified_count() const {
        std::lock_guard lock(mutex_);
        std::size_t n = 0;
        for (const auto& [url, j] : lines_)
            if (j["labels"].empty()) ++n;
        return n;
    }

    /// Rewrites the store with one line per URL in the given order (URLs not
    /// listed keep their lines at the end, sorted). Atomic replace.
    void finalize(const std::vector<std::string>& url_order) {
        std::lock_guard lock(mutex_);
        std::string tmp_path = path_ + ".tmp";
        {
            std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
            if (!out) raise(ErrorCode::StoreError, "cannot write '" + tmp_path + "'");
            std::set<std::string> written;
            for (const auto& url : url_order) {
                auto it = lines_.find(url);
                if (it == lines_.end()) continue;
                out << it->second.dump() << '\n';
                written.insert(url);
            }
            for (const auto& [url, j] : lines_)
                if (!written.count(url)) out << j.dump() << '\n';
        }
        std::error_code ec;
        std::filesystem::rename(tmp_path, path_, ec);
        if (ec) raise(ErrorCode::StoreError, "cannot replace '" + path_ + "': " + ec.message());
    }

private:
    void write_line(const std::string& url, nlohmann::json j) {
        std::lock_guard lock(mutex_);
        std::ofstream out(path_, std::ios::binary | std::ios::app);
        if (!out) raise(ErrorCode::StoreError, "cannot append to '" + path_ + "'");
        out << j.dump() << '\n';
        out.flush();
        if (!out) raise(ErrorCode::StoreError, "write to '" + path_ + "' failed");
        lines_[url] = std::move(j);
    }

    std::string path_;
    mutable std::mutex mutex_;
    std::map<std::string, nlohmann::json> lines_;
};

struct ClassifyOptions {
    std::size_t batch_size = 10;
    int parse_retries = 2;  // per batch, before splitting
};

struct ClassifyOutcome {
    std::size_t classified = 0;
    std::size_t unclassified = 0;
    std::size_t skipped = 0;  // already in the store
    std::size_t requests = 0;
};

/// Supplies the screenshot PNG for a record when the template needs one.
using ScreenshotSource = std::function<std::vector<std::uint8_t>(const WebsiteRecord&)>;

namespace detail {

inline bool is_parse_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedJson:
        case ErrorCode::MissingUrls:
        case ErrorCode::ExtraUrls:
        case ErrorCode::InvalidLabel:
        case ErrorCode::WrongCardinality:
            return true;
        default:
            return false;
    }
}

}  // namespace detail

/// Batches a manifest through a backend: render, complete, parse, persist.
/// A batch whose response fails validation is retried whole, then split in
/// half and recursed; a single record that keeps failing is recorded as
/// unclassified with the reason. Backend failures that survive the client's
/// own retries (quota, transport) mark the batch unclassified rather than
/// aborting the run. Already-stored URLs are skipped, so reruns resume.
inline ClassifyOutcome classify(const dataset::DatasetManifest& manifest,
                                const PromptTemplate& tmpl, llm::Backend& backend,
                                const ClassifyOptions& options, PredictionStore& store,
                                const ScreenshotSource& screenshots = {}) {
    tmpl.validate();
    if (options.batch_size == 0) raise(ErrorCode::PreconditionFailed, "batch_size must be >= 1");
    if (tmpl.with_screenshots && !screenshots)
        raise(ErrorCode::MissingScreenshot, "template requires screenshots but none supplied");

    ClassifyOutcome outcome;
    std::vector<const WebsiteRecord*> pending;
    for (const auto& mr : manifest.records) {
        if (store.contains(mr.record.url)) {
            ++outcome.skipped;
        } else {
            pending.push_back(&mr.record);
        }
    }

    std::vector<std::vector<const WebsiteRecord*>> batches;
    for (std::size_t i = 0; i < pending.size(); i += options.batch_size) {
        auto last = std::min(i + options.batch_size, pending.size());
        batches.emplace_back(pending.begin() + static_cast<std::ptrdiff_t>(i),
                             pending.begin() + static_cast<std::ptrdiff_t>(last));
    }

    std::atomic<std::size_t> requests{0};
    const std::string backend_name = backend.config().name;
    const std::string template_hash = tmpl.hash();

    std::function<void(const std::vector<const WebsiteRecord*>&, int)> process =
        [&](const std::vector<const WebsiteRecord*>& batch, int retries_left) {
            std::vector<WebsiteRecord> records;
            records.reserve(batch.size());
            for (const auto* rec : batch) records.push_back(*rec);
            std::vector<std::vector<std::uint8_t>> images;
            if (tmpl.with_screenshots)
                for (const auto& rec : records) images.push_back(screenshots(rec));

            auto bundle = render(tmpl, records, std::move(images));
            std::string failure;
            try {
                requests.fetch_add(1);
                auto result = backend.complete({bundle.text, bundle.images, 0.0});
                auto parsed = parse_response(result.text, bundle, tmpl);
                auto digest = digest_hex(result.text);
                for (const auto& url : bundle.expected_urls)
                    store.append_prediction(url, tmpl.task, parsed.by_url.at(url).labels, digest,
                                            backend_name, template_hash);
                return;
            } catch (const Error& e) {
                if (detail::is_parse_error(e.code())) {
                    if (retries_left > 0) {
                        process(batch, retries_left - 1);
                        return;
                    }
                    if (batch.size() > 1) {
                        std::size_t half = batch.size() / 2;
                        std::vector<const WebsiteRecord*> left(batch.begin(),
                                                               batch.begin() + half);
                        std::vector<const WebsiteRecord*> right(batch.begin() + half,
                                                                batch.end());
                        process(left, options.parse_retries);
                        process(right, options.parse_retries);
                        return;
                    }
                    failure = e.what();
                } else if (e.code() == ErrorCode::QuotaExhausted ||
                           e.code() == ErrorCode::TransportError ||
                           e.code() == ErrorCode::UnknownFingerprint) {
                    failure = e.what();
                } else {
                    throw;  // auth/config/store problems are fatal
                }
            }
            for (const auto* rec : batch)
                store.append_unclassified(rec->url, tmpl.task, failure, backend_name,
                                          template_hash);
        };

    const int workers_wanted = backend.config().max_concurrent;
    const std::size_t worker_count =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers_wanted)),
                              batches.empty() ? 1 : batches.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::mutex error_mutex;
    std::exception_ptr first_error;
    for (std::size_t w = 0; w < worker_count; ++w) {
        workers.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= batches.size()) return;
                try {
                    process(batches[i], options.parse_retries);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);

    outcome.requests = requests.load();
    outcome.unclassified = store.unclassified_count();
    outcome.classified = store.size() - outcome.unclassified;

    std::vector<std::string> order;
    for (const auto& mr : manifest.records) order.push_back(mr.record.url);
    store.finalize(order);
    return outcome;
}

}  // namespace sitelens::prompt
