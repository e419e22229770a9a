#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sitelens/core/error.hpp"
#include "sitelens/core/record.hpp"
#include "sitelens/core/strings.hpp"
#include "sitelens/core/timeutil.hpp"

namespace sitelens::crawl {

enum class CrawlOutcome { Success, NavError, Timeout };

inline std::string_view outcome_name(CrawlOutcome outcome) {
    switch (outcome) {
        case CrawlOutcome::Success: return "success";
        case CrawlOutcome::NavError: return "nav_error";
        case CrawlOutcome::Timeout: return "timeout";
    }
    return "unknown";
}

inline CrawlOutcome outcome_from_name(std::string_view name) {
    if (name == "success") return CrawlOutcome::Success;
    if (name == "nav_error") return CrawlOutcome::NavError;
    if (name == "timeout") return CrawlOutcome::Timeout;
    raise(ErrorCode::ParseError, "unknown crawl outcome '" + std::string(name) + "'");
}

struct Cookie {
    std::string name;
    std::size_t value_length = 0;  // the value itself is not stored
    std::string domain;            // lowercase, leading dot stripped
    std::string path;
    double expires = -1.0;         // unix seconds; -1 for session cookies
    bool secure = false;
    bool http_only = false;
    std::string same_site;

    bool operator==(const Cookie&) const = default;
};

inline nlohmann::json cookie_to_json(const Cookie& c) {
    return {{"name", c.name},         {"value_length", c.value_length},
            {"domain", c.domain},     {"path", c.path},
            {"expires", c.expires},   {"secure", c.secure},
            {"http_only", c.http_only}, {"same_site", c.same_site}};
}

inline Cookie cookie_from_json(const nlohmann::json& j) {
    Cookie c;
    c.name = j.value("name", "");
    c.value_length = j.value("value_length", std::size_t{0});
    c.domain = j.value("domain", "");
    c.path = j.value("path", "/");
    c.expires = j.value("expires", -1.0);
    c.secure = j.value("secure", false);
    c.http_only = j.value("http_only", false);
    c.same_site = j.value("same_site", "");
    return c;
}

/// Normalizes a raw cookie domain: lowercase, leading dot stripped.
inline std::string normalize_cookie_domain(std::string_view raw) {
    std::string d = to_lower(trim(raw));
    if (!d.empty() && d.front() == '.') d.erase(0, 1);
    return d;
}

/// Everything harvested from one landing-page visit.
struct CrawlArtifact {
    WebsiteRecord record;
    CrawlOutcome outcome = CrawlOutcome::NavError;
    std::string outcome_reason;
    std::string final_url;
    int http_status = 0;
    std::vector<std::uint8_t> screenshot;  // empty when absent
    std::vector<Cookie> cookies;
    std::vector<std::string> body_script_domains;
    std::string html;
    std::string fetched_at;
};

/// One directory per registrable domain containing meta.json, cookies.json
/// and, when harvested, screenshot.png and page.html. Writes go to a
/// ".partial" directory renamed into place, so a crashed crawl never leaves
/// a half-written artifact behind and reruns can resume safely. Distinct
/// domains may be written concurrently.
class ArtifactStore {
public:
    explicit ArtifactStore(std::filesystem::path root) : root_(std::move(root)) {
        std::error_code ec;
        std::filesystem::create_directories(root_, ec);
        if (ec) raise(ErrorCode::StoreError, "cannot create store '" + root_.string() + "'");
    }

    const std::filesystem::path& root() const { return root_; }

    bool contains(const std::string& registrable_domain) const {
        return std::filesystem::exists(root_ / registrable_domain / "meta.json");
    }

    void save(const CrawlArtifact& artifact) const {
        const auto final_dir = root_ / artifact.record.registrable_domain;
        const auto partial = root_ / (artifact.record.registrable_domain + ".partial");
        std::error_code ec;
        std::filesystem::remove_all(partial, ec);
        std::filesystem::create_directories(partial, ec);
        if (ec) raise(ErrorCode::StoreError, "cannot create '" + partial.string() + "'");

        nlohmann::json meta{
            {"url", artifact.record.url},
            {"registrable_domain", artifact.record.registrable_domain},
            {"outcome", std::string(outcome_name(artifact.outcome))},
            {"outcome_reason", artifact.outcome_reason},
            {"final_url", artifact.final_url},
            {"http_status", artifact.http_status},
            {"fetched_at", artifact.fetched_at},
            {"body_script_domains", artifact.body_script_domains},
        };
        write_file(partial / "meta.json", meta.dump(2) + "\n");

        nlohmann::json cookies = nlohmann::json::array();
        for (const auto& c : artifact.cookies) cookies.push_back(cookie_to_json(c));
        write_file(partial / "cookies.json", cookies.dump(2) + "\n");

        if (!artifact.screenshot.empty())
            write_file(partial / "screenshot.png",
                       std::string_view(reinterpret_cast<const char*>(artifact.screenshot.data()),
                                        artifact.screenshot.size()));
        if (!artifact.html.empty()) write_file(partial / "page.html", artifact.html);

        std::filesystem::remove_all(final_dir, ec);
        std::filesystem::rename(partial, final_dir, ec);
        if (ec)
            raise(ErrorCode::StoreError,
                  "cannot finalize artifact for '" + artifact.record.registrable_domain +
                      "': " + ec.message());
    }

    CrawlArtifact load(const std::string& registrable_domain) const {
        const auto dir = root_ / registrable_domain;
        if (!std::filesystem::exists(dir / "meta.json"))
            raise(ErrorCode::StoreError, "no artifact for '" + registrable_domain + "'");

        CrawlArtifact artifact;
        nlohmann::json meta = nlohmann::json::parse(read_file(dir / "meta.json"), nullptr, false);
        if (meta.is_discarded())
            raise(ErrorCode::StoreError, "corrupt meta.json for '" + registrable_domain + "'");
        artifact.record.url = meta.value("url", "");
        artifact.record.registrable_domain = meta.value("registrable_domain", registrable_domain);
        artifact.outcome = outcome_from_name(meta.value("outcome", "nav_error"));
        artifact.outcome_reason = meta.value("outcome_reason", "");
        artifact.final_url = meta.value("final_url", "");
        artifact.http_status = meta.value("http_status", 0);
        artifact.fetched_at = meta.value("fetched_at", "");
        if (meta.contains("body_script_domains"))
            artifact.body_script_domains =
                meta["body_script_domains"].get<std::vector<std::string>>();

        if (std::filesystem::exists(dir / "cookies.json")) {
            nlohmann::json cookies =
                nlohmann::json::parse(read_file(dir / "cookies.json"), nullptr, false);
            if (cookies.is_array())
                for (const auto& j : cookies) artifact.cookies.push_back(cookie_from_json(j));
        }
        if (std::filesystem::exists(dir / "page.html"))
            artifact.html = read_file(dir / "page.html");
        if (std::filesystem::exists(dir / "screenshot.png")) {
            auto bytes = read_file(dir / "screenshot.png");
            artifact.screenshot.assign(bytes.begin(), bytes.end());
        }
        return artifact;
    }

    std::vector<std::string> domains() const {
        std::vector<std::string> out;
        for (const auto& entry : std::filesystem::directory_iterator(root_)) {
            if (!entry.is_directory()) continue;
            auto name = entry.path().filename().string();
            if (name.ends_with(".partial")) continue;
            if (std::filesystem::exists(entry.path() / "meta.json")) out.push_back(name);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    static void write_file(const std::filesystem::path& path, std::string_view data) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) raise(ErrorCode::StoreError, "cannot write '" + path.string() + "'");
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) raise(ErrorCode::StoreError, "write failed for '" + path.string() + "'");
    }

    static std::string read_file(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(ErrorCode::StoreError, "cannot read '" + path.string() + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    std::filesystem::path root_;
};

}  // namespace sitelens::crawl
