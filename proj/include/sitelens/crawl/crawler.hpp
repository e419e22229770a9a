#pragma once

#include <atomic>
#include <mutex>
#include <optional>
#include <thread>

#include "sitelens/crawl/artifact.hpp"
#include "sitelens/crawl/cdp.hpp"
#include "sitelens/crawl/config.hpp"
#include "sitelens/crawl/html.hpp"
#include "sitelens/dataset/manifest.hpp"

namespace sitelens::crawl {

namespace detail {

struct Endpoint {
    std::string host;
    int port = 0;
};

inline Endpoint parse_endpoint(const std::string& spec) {
    auto colon = spec.rfind(':');
    if (colon == std::string::npos)
        raise(ErrorCode::ConfigError, "devtools endpoint must be host:port, got '" + spec + "'");
    Endpoint ep;
    ep.host = spec.substr(0, colon);
    ep.port = std::stoi(spec.substr(colon + 1));
    return ep;
}

inline std::string evaluate_string(CdpConnection& cdp, const std::string& expression,
                                   std::chrono::milliseconds timeout) {
    auto result = cdp.call(
        "Runtime.evaluate",
        {{"expression", expression}, {"returnByValue", true}}, timeout);
    if (result.contains("result") && result["result"].contains("value") &&
        result["result"]["value"].is_string())
        return result["result"]["value"].get<std::string>();
    return {};
}

inline std::vector<Cookie> harvest_cookies(CdpConnection& cdp,
                                           std::chrono::milliseconds timeout) {
    std::vector<Cookie> cookies;
    auto result = cdp.call("Network.getAllCookies", nlohmann::json::object(), timeout);
    if (!result.contains("cookies") || !result["cookies"].is_array()) return cookies;
    for (const auto& j : result["cookies"]) {
        Cookie cookie;
        cookie.name = j.value("name", "");
        cookie.value_length = j.contains("value") && j["value"].is_string()
                                  ? j["value"].get<std::string>().size()
                                  : j.value("size", std::size_t{0});
        cookie.domain = normalize_cookie_domain(j.value("domain", ""));
        cookie.path = j.value("path", "/");
        cookie.expires = j.value("expires", -1.0);
        cookie.secure = j.value("secure", false);
        cookie.http_only = j.value("httpOnly", false);
        cookie.same_site = j.value("sameSite", "");
        if (!cookie.domain.empty()) cookies.push_back(std::move(cookie));
    }
    return cookies;
}

/// Main-document HTTP status from buffered Network.responseReceived events.
inline int document_status(CdpConnection& cdp, const std::string& frame_id) {
    int status = 0;
    for (const auto& params : cdp.take_events("Network.responseReceived")) {
        if (params.value("type", "") != "Document") continue;
        if (!frame_id.empty() && params.value("frameId", "") != frame_id) continue;
        if (params.contains("response") && params["response"].contains("status")) {
            status = params["response"]["status"].get<int>();
            break;
        }
    }
    return status;
}

}  // namespace detail

/// Visits one landing page in a fresh browser instance (or an attached
/// DevTools endpoint when the config names one), waits load_wait after the
/// load event, and harvests screenshot, cookies, rendered HTML and
/// body-script hosts. Per-site failures come back as NavError/Timeout
/// artifacts; only an unusable browser environment throws.
inline CrawlArtifact visit(const WebsiteRecord& record, const CrawlConfig& config) {
    config.validate();

    CrawlArtifact artifact;
    artifact.record = record;
    artifact.fetched_at = now_iso8601_utc();

    std::optional<BrowserProcess> browser;
    detail::Endpoint endpoint{"127.0.0.1", 0};
    if (config.devtools_endpoint.empty()) {
        browser.emplace(BrowserProcess::launch(config));
        endpoint.port = browser->port();
    } else {
        endpoint = detail::parse_endpoint(config.devtools_endpoint);
    }

    const auto command_timeout =
        std::max(config.nav_timeout, std::chrono::milliseconds(5000));
    try {
        auto ws_path =
            discover_page_target(endpoint.host, endpoint.port, std::chrono::seconds(10));
        CdpConnection cdp(endpoint.host, endpoint.port, ws_path, command_timeout);

        cdp.call("Page.enable", nlohmann::json::object(), command_timeout);
        cdp.call("Network.enable", nlohmann::json::object(), command_timeout);
        cdp.call("Runtime.enable", nlohmann::json::object(), command_timeout);
        cdp.call("Emulation.setDeviceMetricsOverride",
                 {{"width", config.viewport_width},
                  {"height", config.viewport_height},
                  {"deviceScaleFactor", 1},
                  {"mobile", false}},
                 command_timeout);

        auto nav = cdp.call("Page.navigate", {{"url", record.url}}, command_timeout);
        const std::string frame_id = nav.value("frameId", "");
        if (auto error_text = nav.value("errorText", ""); !error_text.empty()) {
            artifact.outcome = CrawlOutcome::NavError;
            artifact.outcome_reason = error_text;
            artifact.cookies = detail::harvest_cookies(cdp, command_timeout);
            return artifact;
        }

        if (!cdp.wait_event("Page.loadEventFired", config.nav_timeout)) {
            artifact.outcome = CrawlOutcome::Timeout;
            artifact.outcome_reason =
                "load event not fired within " + std::to_string(config.nav_timeout.count()) +
                " ms";
            artifact.cookies = detail::harvest_cookies(cdp, command_timeout);
            return artifact;
        }
        std::this_thread::sleep_for(config.load_wait);

        artifact.final_url =
            detail::evaluate_string(cdp, "location.href", command_timeout);
        if (artifact.final_url.empty()) artifact.final_url = record.url;
        artifact.html = detail::evaluate_string(
            cdp, "document.documentElement.outerHTML", command_timeout);
        auto shot =
            cdp.call("Page.captureScreenshot", {{"format", "png"}}, command_timeout);
        if (shot.contains("data"))
            artifact.screenshot = base64_decode(shot["data"].get<std::string>());
        artifact.cookies = detail::harvest_cookies(cdp, command_timeout);
        artifact.http_status = detail::document_status(cdp, frame_id);
        try {
            artifact.body_script_domains =
                extract_body_scripts(artifact.html, parse_url(artifact.final_url));
        } catch (const Error&) {
            artifact.body_script_domains = extract_body_scripts(artifact.html, parse_url(record.url));
        }
        artifact.outcome = CrawlOutcome::Success;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::BrowserLaunch) throw;
        artifact.outcome = CrawlOutcome::NavError;
        artifact.outcome_reason = e.what();
    }
    return artifact;
}

struct CrawlSummary {
    std::size_t total = 0;
    std::size_t success = 0;
    std::size_t nav_error = 0;
    std::size_t timeout = 0;
    std::size_t skipped = 0;  // already stored before the run
};

/// Visits every manifest record not yet in the store, with at most
/// max_parallel concurrent browser instances. Artifacts are written as soon
/// as each visit finishes, so an interrupted crawl resumes where it stopped.
/// Per-site failures are recorded in their artifacts; only store failures
/// and an unusable browser environment abort the run.
inline CrawlSummary crawl_all(const dataset::DatasetManifest& manifest,
                              const CrawlConfig& config, const ArtifactStore& store) {
    config.validate();
    CrawlSummary summary;
    summary.total = manifest.records.size();

    std::vector<const WebsiteRecord*> pending;
    for (const auto& mr : manifest.records) {
        if (store.contains(mr.record.registrable_domain)) {
            ++summary.skipped;
        } else {
            pending.push_back(&mr.record);
        }
    }

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> success{0}, nav_error{0}, timeout{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= pending.size()) return;
            {
                std::lock_guard lock(error_mutex);
                if (first_error) return;
            }
            try {
                auto artifact = visit(*pending[i], config);
                store.save(artifact);
                switch (artifact.outcome) {
                    case CrawlOutcome::Success: ++success; break;
                    case CrawlOutcome::NavError: ++nav_error; break;
                    case CrawlOutcome::Timeout: ++timeout; break;
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const std::size_t worker_count = std::min<std::size_t>(
        static_cast<std::size_t>(config.max_parallel), std::max<std::size_t>(pending.size(), 1));
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < worker_count; ++w) workers.emplace_back(worker);
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);

    summary.success = success.load();
    summary.nav_error = nav_error.load();
    summary.timeout = timeout.load();
    return summary;
}

}  // namespace sitelens::crawl
