#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sitelens/core/csv.hpp"
#include "sitelens/core/error.hpp"
#include "sitelens/core/record.hpp"
#include "sitelens/core/timeutil.hpp"

namespace sitelens::dataset {

inline constexpr std::string_view kProvenanceSeedList = "seed-list";
inline constexpr std::string_view kProvenanceTrancoSample = "tranco-sample";
inline constexpr std::string_view kProvenanceManual = "manual";

struct ManifestRecord {
    WebsiteRecord record;
    std::string provenance;
    bool generic_tld = false;

    bool operator==(const ManifestRecord&) const = default;
};

/// A labeled benchmark dataset for one task. Records carry exactly one
/// ground-truth label for the manifest's task and no duplicate registrable
/// domains. created_at is in-memory metadata and is not serialized.
struct DatasetManifest {
    TaskKind task = TaskKind::Governmental;
    std::vector<ManifestRecord> records;
    std::uint64_t seed = 0;
    std::string created_at;

    std::map<std::string, std::size_t> class_counts() const {
        std::map<std::string, std::size_t> counts;
        for (const auto& mr : records) counts[mr.record.labels.at(task)]++;
        return counts;
    }
};

inline std::string manifest_to_jsonl(const DatasetManifest& manifest) {
    std::string out;
    for (const auto& mr : manifest.records) {
        nlohmann::json line{
            {"url", mr.record.url},
            {"registrable_domain", mr.record.registrable_domain},
            {"task", std::string(task_name(manifest.task))},
            {"label", mr.record.labels.at(manifest.task)},
            {"provenance", mr.provenance},
            {"generic_tld", mr.generic_tld},
        };
        if (mr.record.tranco_rank) line["tranco_rank"] = *mr.record.tranco_rank;
        out += line.dump();
        out += '\n';
    }
    return out;
}

inline void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot write manifest '" + path + "'");
    out << manifest_to_jsonl(manifest);
}

inline DatasetManifest load_manifest(std::istream& in, const PublicSuffixTable& psl) {
    DatasetManifest manifest;
    manifest.created_at = now_iso8601_utc();
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    bool task_set = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            raise(ErrorCode::ParseError, "manifest line " + std::to_string(line_no) + ": bad JSON");
        for (const char* key : {"url", "task", "label", "provenance"})
            if (!j.contains(key))
                raise(ErrorCode::ParseError,
                      "manifest line " + std::to_string(line_no) + ": missing '" + key + "'");
        TaskKind task = task_from_name(j["task"].get<std::string>());
        if (!task_set) {
            manifest.task = task;
            task_set = true;
        } else if (task != manifest.task) {
            raise(ErrorCode::ParseError,
                  "manifest line " + std::to_string(line_no) + ": mixed tasks in one manifest");
        }
        ManifestRecord mr;
        mr.record = normalize_url(j["url"].get<std::string>(), psl);
        mr.record.labels[task] = j["label"].get<std::string>();
        if (j.contains("tranco_rank")) mr.record.tranco_rank = j["tranco_rank"].get<std::uint32_t>();
        mr.provenance = j["provenance"].get<std::string>();
        mr.generic_tld = j.value("generic_tld", false);
        if (!seen.insert(mr.record.registrable_domain).second)
            raise(ErrorCode::ParseError, "manifest line " + std::to_string(line_no) +
                                             ": duplicate registrable domain '" +
                                             mr.record.registrable_domain + "'");
        manifest.records.push_back(std::move(mr));
    }
    return manifest;
}

inline DatasetManifest load_manifest(const std::string& path, const PublicSuffixTable& psl) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open manifest '" + path + "'");
    return load_manifest(in, psl);
}

/// Seed list: one domain or URL per line; '#' comments and blanks skipped.
inline std::vector<WebsiteRecord> load_seed_list(std::istream& in, const PublicSuffixTable& psl) {
    std::vector<WebsiteRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty() || t.starts_with("#")) continue;
        records.push_back(normalize_url(t, psl));
    }
    return records;
}

inline std::vector<WebsiteRecord> load_seed_list(const std::string& path,
                                                 const PublicSuffixTable& psl) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open seed list '" + path + "'");
    return load_seed_list(in, psl);
}

/// Manual labels: CSV "domain,label", lowercased domains, '#' comments ok.
inline std::map<std::string, std::string> load_manual_labels(std::istream& in) {
    std::map<std::string, std::string> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty() || t.starts_with("#")) continue;
        auto fields = csv_split(t);
        if (fields.size() != 2)
            raise(ErrorCode::ParseError,
                  "manual labels line " + std::to_string(line_no) + ": expected 'domain,label'");
        labels[to_lower(trim(fields[0]))] = std::string(trim(fields[1]));
    }
    return labels;
}

inline std::map<std::string, std::string> load_manual_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open manual labels '" + path + "'");
    return load_manual_labels(in);
}

struct CurlieEntry {
    std::string domain;
    std::vector<std::string> categories;
};

/// Curlie-style snapshot: CSV "domain,cat1;cat2;...".
inline std::vector<CurlieEntry> load_curlie(std::istream& in) {
    std::vector<CurlieEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty() || t.starts_with("#")) continue;
        auto fields = csv_split(t);
        if (fields.size() != 2)
            raise(ErrorCode::ParseError,
                  "curlie line " + std::to_string(line_no) + ": expected 'domain,categories'");
        CurlieEntry entry;
        entry.domain = to_lower(trim(fields[0]));
        for (auto& cat : split(fields[1], ';')) {
            auto c = trim(cat);
            if (!c.empty()) entry.categories.emplace_back(c);
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

inline std::vector<CurlieEntry> load_curlie(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open curlie snapshot '" + path + "'");
    return load_curlie(in);
}

}  // namespace sitelens::dataset
