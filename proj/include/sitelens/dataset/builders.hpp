#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sitelens/core/rng.hpp"
#include "sitelens/dataset/cctld.hpp"
#include "sitelens/dataset/manifest.hpp"
#include "sitelens/dataset/tranco.hpp"

namespace sitelens::dataset {

/// TLD suffixes treated as governmental hosting; such domains never enter
/// the non-governmental sample. Config-extensible.
inline const std::set<std::string>& default_excluded_gov_tlds() {
    static const std::set<std::string> tlds = {
        "gov", "mil", "gov.uk", "gc.ca", "gov.au", "go.jp", "gouv.fr",
        "gov.it", "gov.in", "gov.br",
    };
    return tlds;
}

namespace detail {

inline bool tld_excluded(const std::string& host, const std::set<std::string>& excluded) {
    for (const auto& tld : excluded)
        if (dot_suffix_match(host, tld)) return true;
    return false;
}

/// Tranco entries as normalized records, in file order, one per registrable
/// domain. Rows that do not normalize (malformed, public-suffix-only) are
/// dropped; `used` filters and accumulates claimed registrable domains.
inline std::vector<WebsiteRecord> eligible_pool(const std::vector<TrancoEntry>& tranco,
                                                const PublicSuffixTable& psl,
                                                std::set<std::string>& used,
                                                auto&& keep) {
    std::vector<WebsiteRecord> pool;
    std::set<std::string> local;
    for (const auto& entry : tranco) {
        WebsiteRecord rec;
        try {
            rec = normalize_url(entry.domain, psl);
        } catch (const Error&) {
            continue;
        }
        if (used.count(rec.registrable_domain) || !local.insert(rec.registrable_domain).second)
            continue;
        if (!keep(rec)) continue;
        rec.tranco_rank = entry.rank;
        pool.push_back(std::move(rec));
    }
    return pool;
}

}  // namespace detail

/// Balanced governmental benchmark: every seed record labeled "gov" plus an
/// equal-size seeded uniform sample of Tranco domains labeled "non-gov",
/// skipping governmental TLDs and domains already present in the seed.
inline DatasetManifest build_governmental_dataset(
    const std::vector<WebsiteRecord>& gov_seed, const std::vector<TrancoEntry>& tranco,
    const std::set<std::string>& excluded_tlds, std::uint64_t seed,
    const PublicSuffixTable& psl) {
    if (gov_seed.empty()) raise(ErrorCode::PreconditionFailed, "governmental seed list is empty");

    DatasetManifest manifest;
    manifest.task = TaskKind::Governmental;
    manifest.seed = seed;
    manifest.created_at = now_iso8601_utc();

    std::set<std::string> used;
    for (const auto& rec : gov_seed) {
        if (!used.insert(rec.registrable_domain).second) continue;  // seed-internal duplicate
        ManifestRecord mr;
        mr.record = rec;
        mr.record.labels[TaskKind::Governmental] = std::string(kLabelGov);
        mr.provenance = kProvenanceSeedList;
        manifest.records.push_back(std::move(mr));
    }
    const std::size_t need = manifest.records.size();

    auto pool = detail::eligible_pool(tranco, psl, used, [&](const WebsiteRecord& rec) {
        return !detail::tld_excluded(rec.host, excluded_tlds);
    });
    if (pool.size() < need)
        raise(ErrorCode::InsufficientPopulation,
              "need " + std::to_string(need) + " non-governmental domains, only " +
                  std::to_string(pool.size()) + " eligible");

    std::mt19937_64 rng(seed);
    for (auto idx : sample_indices(pool.size(), need, rng)) {
        ManifestRecord mr;
        mr.record = pool[idx];
        mr.record.labels[TaskKind::Governmental] = std::string(kLabelNonGov);
        mr.provenance = kProvenanceTrancoSample;
        manifest.records.push_back(std::move(mr));
    }
    return manifest;
}

/// Country benchmark: per_cc seeded samples per ccTLD labeled by TLD, plus
/// generic_n generic-TLD samples labeled from the manual file; classes that
/// end up below min_class are dropped. Generic-TLD records are flagged for
/// subset evaluation.
inline DatasetManifest build_country_dataset(
    const std::vector<TrancoEntry>& tranco, const CcTldMap& map, std::size_t per_cc,
    std::size_t generic_n, std::size_t min_class,
    const std::map<std::string, std::string>& manual_labels, std::uint64_t seed,
    const PublicSuffixTable& psl) {
    if (per_cc == 0) raise(ErrorCode::PreconditionFailed, "per_cc must be >= 1");
    map.validate();

    DatasetManifest manifest;
    manifest.task = TaskKind::Country;
    manifest.seed = seed;
    manifest.created_at = now_iso8601_utc();

    std::mt19937_64 rng(seed);
    std::set<std::string> used;

    for (const auto& [tld, country] : map.cc) {
        auto pool = detail::eligible_pool(tranco, psl, used, [&](const WebsiteRecord& rec) {
            auto label = tld_country_label(rec.host, map);
            return label.kind == TldClass::Country && label.matched_tld == tld;
        });
        if (pool.size() < per_cc)
            raise(ErrorCode::InsufficientPopulation,
                  "ccTLD '" + tld + "': need " + std::to_string(per_cc) + " domains, only " +
                      std::to_string(pool.size()) + " available");
        for (auto idx : sample_indices(pool.size(), per_cc, rng)) {
            ManifestRecord mr;
            mr.record = pool[idx];
            mr.record.labels[TaskKind::Country] = country;
            mr.provenance = kProvenanceTrancoSample;
            used.insert(mr.record.registrable_domain);
            manifest.records.push_back(std::move(mr));
        }
    }

    if (generic_n > 0) {
        auto pool = detail::eligible_pool(tranco, psl, used, [&](const WebsiteRecord& rec) {
            return tld_country_label(rec.host, map).kind == TldClass::Generic;
        });
        if (pool.size() < generic_n)
            raise(ErrorCode::InsufficientPopulation,
                  "generic TLDs: need " + std::to_string(generic_n) + " domains, only " +
                      std::to_string(pool.size()) + " available");
        std::vector<std::string> missing;
        std::vector<ManifestRecord> sampled;
        for (auto idx : sample_indices(pool.size(), generic_n, rng)) {
            const auto& rec = pool[idx];
            auto it = manual_labels.find(rec.host);
            if (it == manual_labels.end()) it = manual_labels.find(rec.registrable_domain);
            if (it == manual_labels.end()) {
                missing.push_back(rec.host);
                continue;
            }
            const std::string& label = it->second;
            if (!is_valid_label(TaskKind::Country, label))
                raise(ErrorCode::InvalidLabel,
                      "manual label '" + label + "' for '" + rec.host + "'");
            ManifestRecord mr;
            mr.record = rec;
            mr.record.labels[TaskKind::Country] = label;
            mr.provenance = kProvenanceManual;
            mr.generic_tld = true;
            sampled.push_back(std::move(mr));
        }
        if (!missing.empty()) {
            std::string joined;
            for (const auto& d : missing) {
                if (!joined.empty()) joined += ", ";
                joined += d;
            }
            raise(ErrorCode::MissingManualLabel, "no manual label for: " + joined);
        }
        for (auto& mr : sampled) {
            used.insert(mr.record.registrable_domain);
            manifest.records.push_back(std::move(mr));
        }
    }

    // Drop classes below min_class.
    auto counts = manifest.class_counts();
    std::erase_if(manifest.records, [&](const ManifestRecord& mr) {
        return counts.at(mr.record.labels.at(TaskKind::Country)) < min_class;
    });
    return manifest;
}

/// Category benchmark from a Curlie-style snapshot: keeps single-category
/// entries only and samples per_class per category.
inline DatasetManifest build_category_dataset(
    const std::vector<CurlieEntry>& curlie, std::size_t per_class, std::uint64_t seed,
    const PublicSuffixTable& psl,
    const std::vector<std::string>& categories = default_categories()) {
    if (per_class == 0) raise(ErrorCode::PreconditionFailed, "per_class must be >= 1");

    DatasetManifest manifest;
    manifest.task = TaskKind::Category;
    manifest.seed = seed;
    manifest.created_at = now_iso8601_utc();

    std::mt19937_64 rng(seed);
    std::set<std::string> used;

    for (const auto& category : categories) {
        std::vector<WebsiteRecord> pool;
        std::set<std::string> local;
        for (const auto& entry : curlie) {
            if (entry.categories.size() != 1 || entry.categories[0] != category) continue;
            WebsiteRecord rec;
            try {
                rec = normalize_url(entry.domain, psl);
            } catch (const Error&) {
                continue;
            }
            if (used.count(rec.registrable_domain) || !local.insert(rec.registrable_domain).second)
                continue;
            pool.push_back(std::move(rec));
        }
        if (pool.size() < per_class)
            raise(ErrorCode::InsufficientPopulation,
                  "category '" + category + "': need " + std::to_string(per_class) +
                      " single-category domains, only " + std::to_string(pool.size()) +
                      " available");
        for (auto idx : sample_indices(pool.size(), per_class, rng)) {
            ManifestRecord mr;
            mr.record = pool[idx];
            mr.record.labels[TaskKind::Category] = category;
            mr.provenance = kProvenanceSeedList;
            used.insert(mr.record.registrable_domain);
            manifest.records.push_back(std::move(mr));
        }
    }
    return manifest;
}

}  // namespace sitelens::dataset
