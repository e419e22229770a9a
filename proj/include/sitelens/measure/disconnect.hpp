#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sitelens/core/error.hpp"
#include "sitelens/core/strings.hpp"

namespace sitelens::measure {

/// Tracker domains flattened from a Disconnect-style services file. Entries
/// are host-granular; matching is exact or on dot-boundary suffixes.
struct TrackerList {
    std::set<std::string> domains;
    std::map<std::string, std::size_t> category_counts;  // diagnostics
    std::string source_name;
    std::string retrieved_at;

    bool contains(std::string_view host) const {
        // Walk the host's dot-suffixes; entries are stored verbatim.
        std::string_view rest = host;
        while (true) {
            if (domains.count(std::string(rest))) return true;
            std::size_t dot = rest.find('.');
            if (dot == std::string_view::npos) return false;
            rest = rest.substr(dot + 1);
        }
    }
};

/// True iff the host equals a tracker entry or sits under one.
inline bool is_tracker(std::string_view host, const TrackerList& list) {
    return list.contains(host);
}

/// Parses the Disconnect services JSON: categories map to entity arrays,
/// entities map property URLs to domain arrays. Leaf values of other shapes
/// (the format carries occasional string flags) are skipped.
inline TrackerList load_disconnect(std::istream& in, const std::string& origin = "") {
    nlohmann::json root = nlohmann::json::parse(in, nullptr, false);
    if (root.is_discarded())
        raise(ErrorCode::SchemaError, "'" + origin + "' is not valid JSON (at $)");
    if (!root.is_object() || !root.contains("categories"))
        raise(ErrorCode::SchemaError, "missing object key 'categories' (at $)");
    const auto& categories = root["categories"];
    if (!categories.is_object())
        raise(ErrorCode::SchemaError, "'categories' is not an object (at $.categories)");

    TrackerList list;
    list.source_name = origin.empty() ? "disconnect" : origin;
    if (root.contains("retrieved") && root["retrieved"].is_string())
        list.retrieved_at = root["retrieved"].get<std::string>();

    for (const auto& [category, entries] : categories.items()) {
        if (!entries.is_array())
            raise(ErrorCode::SchemaError,
                  "category is not an array (at $.categories." + category + ")");
        std::size_t added = 0;
        for (const auto& entry : entries) {
            if (!entry.is_object())
                raise(ErrorCode::SchemaError,
                      "entity entry is not an object (at $.categories." + category + "[])");
            for (const auto& [entity, properties] : entry.items()) {
                if (!properties.is_object()) continue;  // e.g. string flags
                for (const auto& [property_url, domain_list] : properties.items()) {
                    if (!domain_list.is_array()) continue;
                    for (const auto& domain : domain_list) {
                        if (!domain.is_string()) continue;
                        auto host = to_lower(trim(domain.get<std::string>()));
                        if (host.empty()) continue;
                        if (list.domains.insert(host).second) ++added;
                    }
                }
            }
        }
        list.category_counts[category] = added;
    }
    return list;
}

inline TrackerList load_disconnect(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open Disconnect list '" + path + "'");
    return load_disconnect(in, path);
}

}  // namespace sitelens::measure
