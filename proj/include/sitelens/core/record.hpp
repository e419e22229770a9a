#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sitelens/core/countries.hpp"
#include "sitelens/core/error.hpp"
#include "sitelens/core/public_suffix.hpp"
#include "sitelens/core/url.hpp"

namespace sitelens {

enum class TaskKind { Governmental, Country, Category };

inline std::string_view task_name(TaskKind task) {
    switch (task) {
        case TaskKind::Governmental: return "governmental";
        case TaskKind::Country: return "country";
        case TaskKind::Category: return "category";
    }
    return "unknown";
}

inline TaskKind task_from_name(std::string_view name) {
    if (name == "governmental") return TaskKind::Governmental;
    if (name == "country") return TaskKind::Country;
    if (name == "category") return TaskKind::Category;
    raise(ErrorCode::ConfigError, "unknown task '" + std::string(name) + "'");
}

inline constexpr std::string_view kLabelGov = "gov";
inline constexpr std::string_view kLabelNonGov = "non-gov";
inline constexpr std::string_view kLabelInternational = "international";

/// Curlie top-level taxonomy; the default Category vocabulary. Callers may
/// swap in a different list (e.g. a commercial tool's taxonomy) via config.
inline const std::vector<std::string>& default_categories() {
    static const std::vector<std::string> cats = {
        "Arts",      "Business",  "Computers", "Games",    "Health",
        "Home",      "Kids_and_Teens", "News", "Recreation", "Reference",
        "Science",   "Shopping",  "Society",   "Sports",
    };
    return cats;
}

/// Is `label` a member of the task's closed vocabulary?
/// For Category the caller supplies the active vocabulary.
inline bool is_valid_label(TaskKind task, std::string_view label,
                           const std::vector<std::string>& categories = default_categories()) {
    switch (task) {
        case TaskKind::Governmental:
            return label == kLabelGov || label == kLabelNonGov;
        case TaskKind::Country:
            return label == kLabelInternational || is_iso_alpha2(label);
        case TaskKind::Category:
            for (const auto& c : categories)
                if (c == label) return true;
            return false;
    }
    return false;
}

/// Maximum prediction-list length per task (two best guesses for Category,
/// one everywhere else).
inline std::size_t max_predictions(TaskKind task) {
    return task == TaskKind::Category ? 2 : 1;
}

/// A website under study: URL plus identity fields and any labels attached
/// to it. Immutable by convention once constructed.
struct WebsiteRecord {
    std::string url;
    std::string host;
    std::string registrable_domain;
    std::optional<std::uint32_t> tranco_rank;
    std::map<TaskKind, std::string> labels;
    std::map<TaskKind, std::vector<std::string>> predictions;

    bool operator==(const WebsiteRecord&) const = default;
};

/// Builds a WebsiteRecord from a bare domain or an http(s) URL. Scheme
/// defaults to https; host is lowercased; the registrable domain is
/// computed against `table`.
inline WebsiteRecord normalize_url(std::string_view raw, const PublicSuffixTable& table) {
    UrlParts parts = parse_url(raw);
    WebsiteRecord record;
    record.host = parts.host;
    record.registrable_domain = table.registrable_domain(parts.host);
    record.url = format_url(parts);
    return record;
}

}  // namespace sitelens
