#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sitelens/core/public_suffix.hpp"
#include "sitelens/crawl/artifact.hpp"
#include "sitelens/measure/disconnect.hpp"

namespace sitelens::measure {

struct CountryStats {
    std::size_t sites_total = 0;
    std::size_t sites_with_tp_tracker = 0;
    double pct = 0.0;
};

using CountryPrevalence = std::map<std::string, CountryStats>;

namespace detail {

/// Registrable domain with a graceful fallback: hosts that are themselves
/// public suffixes (or unparsable) compare as-is.
inline std::string site_identity(const std::string& host, const PublicSuffixTable& psl) {
    try {
        return psl.registrable_domain(host);
    } catch (const Error&) {
        return host;
    }
}

}  // namespace detail

/// Is any cookie in the artifact a third-party tracker cookie? Third-party
/// means the cookie domain's registrable domain differs from the site's,
/// where site identity is anchored at the final (post-redirect) URL.
inline bool has_third_party_tracker_cookie(const crawl::CrawlArtifact& artifact,
                                           const TrackerList& list,
                                           const PublicSuffixTable& psl) {
    std::string site_host;
    try {
        site_host = parse_url(artifact.final_url.empty() ? artifact.record.url
                                                         : artifact.final_url)
                        .host;
    } catch (const Error&) {
        site_host = artifact.record.host;
    }
    const std::string site = detail::site_identity(site_host, psl);
    for (const auto& cookie : artifact.cookies) {
        if (cookie.domain.empty()) continue;
        if (detail::site_identity(cookie.domain, psl) == site) continue;  // first-party
        if (is_tracker(cookie.domain, list)) return true;
    }
    return false;
}

/// Per-country share of successfully crawled sites with at least one
/// third-party cookie set by a known tracker. Countries with fewer than
/// min_sites successful sites are dropped. Every artifact must carry a
/// Country label.
inline CountryPrevalence third_party_tracker_prevalence(
    const std::vector<crawl::CrawlArtifact>& artifacts, const TrackerList& list,
    const PublicSuffixTable& psl, std::size_t min_sites) {
    if (min_sites < 1) raise(ErrorCode::PreconditionFailed, "min_sites must be >= 1");
    CountryPrevalence out;
    for (const auto& artifact : artifacts) {
        if (artifact.outcome != crawl::CrawlOutcome::Success) continue;
        auto it = artifact.record.labels.find(TaskKind::Country);
        if (it == artifact.record.labels.end())
            raise(ErrorCode::MissingCountryLabel,
                  "artifact '" + artifact.record.registrable_domain + "' has no country label");
        auto& stats = out[it->second];
        ++stats.sites_total;
        if (has_third_party_tracker_cookie(artifact, list, psl)) ++stats.sites_with_tp_tracker;
    }
    for (auto it = out.begin(); it != out.end();) {
        if (it->second.sites_total < min_sites) {
            it = out.erase(it);
        } else {
            it->second.pct = 100.0 * static_cast<double>(it->second.sites_with_tp_tracker) /
                             static_cast<double>(it->second.sites_total);
            ++it;
        }
    }
    return out;
}

struct RankedTracker {
    std::string domain;
    std::size_t sites = 0;

    bool operator==(const RankedTracker&) const = default;
};

/// Per-country top-k tracker script domains by the number of distinct sites
/// embedding them in the document body. Ties break lexicographically.
inline std::map<std::string, std::vector<RankedTracker>> top_script_trackers(
    const std::vector<crawl::CrawlArtifact>& artifacts, const TrackerList& list, std::size_t k) {
    std::map<std::string, std::map<std::string, std::set<std::string>>> sites_by_tracker;
    for (const auto& artifact : artifacts) {
        if (artifact.outcome != crawl::CrawlOutcome::Success) continue;
        auto it = artifact.record.labels.find(TaskKind::Country);
        if (it == artifact.record.labels.end())
            raise(ErrorCode::MissingCountryLabel,
                  "artifact '" + artifact.record.registrable_domain + "' has no country label");
        for (const auto& script_host : artifact.body_script_domains) {
            if (!is_tracker(script_host, list)) continue;
            sites_by_tracker[it->second][script_host].insert(
                artifact.record.registrable_domain);
        }
    }

    std::map<std::string, std::vector<RankedTracker>> out;
    for (const auto& [country, trackers] : sites_by_tracker) {
        std::vector<RankedTracker> ranked;
        for (const auto& [domain, sites] : trackers) ranked.push_back({domain, sites.size()});
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.sites != b.sites) return a.sites > b.sites;
            return a.domain < b.domain;
        });
        if (ranked.size() > k) ranked.resize(k);
        out[country] = std::move(ranked);
    }
    return out;
}

}  // namespace sitelens::measure
