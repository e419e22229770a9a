#pragma once

#include <string>
#include <vector>

#include "sitelens/crawl/artifact.hpp"

namespace sitelens::testing {

/// Minimal valid 1x1 RGBA PNG.
inline const std::vector<std::uint8_t>& tiny_png() {
    static const std::vector<std::uint8_t> bytes = {
        0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A, 0x00, 0x00, 0x00, 0x0D, 0x49,
        0x48, 0x44, 0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x06,
        0x00, 0x00, 0x00, 0x1F, 0x15, 0xC4, 0x89, 0x00, 0x00, 0x00, 0x0A, 0x49, 0x44,
        0x41, 0x54, 0x78, 0x9C, 0x63, 0x00, 0x01, 0x00, 0x00, 0x05, 0x00, 0x01, 0x0D,
        0x0A, 0x2D, 0xB4, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4E, 0x44, 0xAE, 0x42,
        0x60, 0x82,
    };
    return bytes;
}

/// Successful artifact for a planted measurement corpus.
inline crawl::CrawlArtifact make_artifact(const std::string& domain, const std::string& country,
                                          std::vector<std::string> cookie_domains = {},
                                          std::vector<std::string> script_domains = {}) {
    crawl::CrawlArtifact artifact;
    artifact.record.url = "https://" + domain;
    artifact.record.host = domain;
    artifact.record.registrable_domain = domain;
    if (!country.empty()) artifact.record.labels[TaskKind::Country] = country;
    artifact.outcome = crawl::CrawlOutcome::Success;
    artifact.final_url = "https://" + domain + "/";
    artifact.http_status = 200;
    for (const auto& cd : cookie_domains) {
        crawl::Cookie cookie;
        cookie.name = "c";
        cookie.value_length = 1;
        cookie.domain = cd;
        cookie.path = "/";
        artifact.cookies.push_back(cookie);
    }
    artifact.body_script_domains = std::move(script_domains);
    return artifact;
}

}  // namespace sitelens::testing
