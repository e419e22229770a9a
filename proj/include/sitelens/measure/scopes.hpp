#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sitelens/core/csv.hpp"
#include "sitelens/core/error.hpp"
#include "sitelens/core/strings.hpp"

namespace sitelens::measure {

/// One single-sign-on deployment observation: which identity provider a
/// site uses, the requested scopes, whether the request was minimal, and
/// the site's category under two independent classifiers. The minimal flag
/// is input data; it is never re-derived here.
struct ScopeRecord {
    std::string url;
    std::string idp;
    std::vector<std::string> scopes;
    bool minimal = false;
    std::string category_a;  // external tool
    std::string category_b;  // language model

    bool operator==(const ScopeRecord&) const = default;
};

enum class Classifier { A, B };

inline Classifier classifier_from_name(std::string_view name) {
    auto lowered = to_lower(name);
    if (lowered == "a") return Classifier::A;
    if (lowered == "b") return Classifier::B;
    raise(ErrorCode::ConfigError, "classifier must be 'a' or 'b', got '" + std::string(name) + "'");
}

/// JSONL: {url, idp, scopes[], minimal, category_a, category_b} per line.
inline std::vector<ScopeRecord> load_scope_records(std::istream& in) {
    std::vector<ScopeRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            raise(ErrorCode::ParseError,
                  "scope records line " + std::to_string(line_no) + ": bad JSON");
        ScopeRecord rec;
        rec.url = j.value("url", "");
        rec.idp = j.value("idp", "");
        if (j.contains("scopes") && j["scopes"].is_array())
            rec.scopes = j["scopes"].get<std::vector<std::string>>();
        if (!j.contains("minimal") || !j["minimal"].is_boolean())
            raise(ErrorCode::ParseError,
                  "scope records line " + std::to_string(line_no) + ": missing bool 'minimal'");
        rec.minimal = j["minimal"].get<bool>();
        rec.category_a = j.value("category_a", "");
        rec.category_b = j.value("category_b", "");
        if (rec.url.empty() || rec.category_a.empty() || rec.category_b.empty())
            raise(ErrorCode::ParseError, "scope records line " + std::to_string(line_no) +
                                             ": url and both categories are required");
        records.push_back(std::move(rec));
    }
    return records;
}

inline std::vector<ScopeRecord> load_scope_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open scope records '" + path + "'");
    return load_scope_records(in);
}

struct CategoryScopeStats {
    std::size_t total = 0;
    double minimal_pct = 0.0;
};

/// Share of minimal-scope sites per category under the chosen classifier,
/// restricted to the top_n most populous categories. Population ranking
/// always follows classifier A (the original categorization being
/// replicated), so both classifiers are compared over the same category
/// axis. An idp_filter restricts the analysis to one identity provider.
inline std::map<std::string, CategoryScopeStats> minimal_scope_by_category(
    const std::vector<ScopeRecord>& records, Classifier which, std::size_t top_n,
    const std::optional<std::string>& idp_filter = std::nullopt) {
    if (records.empty()) raise(ErrorCode::PreconditionFailed, "no scope records");

    std::vector<const ScopeRecord*> selected;
    for (const auto& rec : records)
        if (!idp_filter || rec.idp == *idp_filter) selected.push_back(&rec);
    if (selected.empty())
        raise(ErrorCode::EmptySelection,
              "no scope records for identity provider '" + (idp_filter ? *idp_filter : "") + "'");

    std::map<std::string, std::size_t> population_a;
    for (const auto* rec : selected) ++population_a[rec->category_a];
    std::vector<std::pair<std::string, std::size_t>> ranked(population_a.begin(),
                                                            population_a.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > top_n) ranked.resize(top_n);
    std::set<std::string> keep;
    for (const auto& [category, n] : ranked) keep.insert(category);

    std::map<std::string, std::size_t> total, minimal;
    for (const auto* rec : selected) {
        const std::string& category = which == Classifier::A ? rec->category_a : rec->category_b;
        if (!keep.count(category)) continue;
        ++total[category];
        if (rec->minimal) ++minimal[category];
    }

    std::map<std::string, CategoryScopeStats> out;
    for (const auto& [category, n] : total) {
        CategoryScopeStats stats;
        stats.total = n;
        stats.minimal_pct = 100.0 * static_cast<double>(minimal[category]) /
                            static_cast<double>(n);
        out[category] = stats;
    }
    return out;
}

struct BreakdownComparison {
    std::map<std::string, double> delta;  // absolute percentage points
    std::string max_delta_category;
    double max_delta = 0.0;
    std::vector<std::string> bottom2_a;
    std::vector<std::string> bottom2_b;
    bool bottom2_agree = false;
};

/// Compares two category->percentage breakdowns over their key intersection;
/// reports per-category absolute deltas, the largest discrepancy, and whether
/// the two bottom-ranked categories coincide.
inline BreakdownComparison compare_breakdowns(const std::map<std::string, double>& a,
                                              const std::map<std::string, double>& b) {
    BreakdownComparison cmp;
    for (const auto& [category, pct_a] : a) {
        auto it = b.find(category);
        if (it == b.end()) continue;
        cmp.delta[category] = std::abs(pct_a - it->second);
    }
    if (cmp.delta.empty())
        raise(ErrorCode::DisjointKeys, "breakdowns share no categories");

    for (const auto& [category, delta] : cmp.delta) {
        if (delta > cmp.max_delta) {
            cmp.max_delta = delta;
            cmp.max_delta_category = category;
        }
    }
    if (cmp.max_delta_category.empty()) cmp.max_delta_category = cmp.delta.begin()->first;

    auto bottom2 = [&](const std::map<std::string, double>& side) {
        std::vector<std::pair<std::string, double>> entries;
        for (const auto& [category, pct] : side)
            if (cmp.delta.count(category)) entries.emplace_back(category, pct);
        std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
            if (x.second != y.second) return x.second < y.second;
            return x.first < y.first;
        });
        std::vector<std::string> names;
        for (std::size_t i = 0; i < entries.size() && i < 2; ++i)
            names.push_back(entries[i].first);
        return names;
    };
    cmp.bottom2_a = bottom2(a);
    cmp.bottom2_b = bottom2(b);
    cmp.bottom2_agree = std::set<std::string>(cmp.bottom2_a.begin(), cmp.bottom2_a.end()) ==
                        std::set<std::string>(cmp.bottom2_b.begin(), cmp.bottom2_b.end());
    return cmp;
}

/// Convenience projection for compare_breakdowns.
inline std::map<std::string, double> to_pct_map(
    const std::map<std::string, CategoryScopeStats>& stats) {
    std::map<std::string, double> out;
    for (const auto& [category, s] : stats) out[category] = s.minimal_pct;
    return out;
}

}  // namespace sitelens::measure
