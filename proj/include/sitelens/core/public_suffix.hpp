#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sitelens/core/error.hpp"
#include "sitelens/core/strings.hpp"
#include "sitelens/core/url.hpp"

namespace sitelens {

/// Parsed public suffix rule set (exact, wildcard and exception rules) with
/// standard PSL lookup semantics. Built once, read-only afterwards.
///
/// Lookup is total for syntactically valid hostnames: a host whose TLD
/// matches no rule falls back to the implicit "*" rule (the last label is
/// the public suffix).
class PublicSuffixTable {
public:
    static PublicSuffixTable from_string(std::string_view text) {
        PublicSuffixTable table;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            std::string_view line = (end == std::string_view::npos)
                                        ? text.substr(start)
                                        : text.substr(start, end - start);
            table.add_line(line);
            if (end == std::string_view::npos) break;
            start = end + 1;
        }
        return table;
    }

    static PublicSuffixTable from_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(ErrorCode::IoError, "cannot open public suffix list '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_string(buf.str());
    }

    std::size_t rule_count() const noexcept {
        return exact_.size() + wildcard_.size() + exception_.size();
    }

    /// The public suffix of `host` ("co.uk" for "shop.ebay.co.uk").
    std::string public_suffix(std::string_view host) const {
        auto offsets = label_offsets(host);
        std::size_t idx = suffix_label_index(host, offsets);
        return idx < offsets.size() ? std::string(host.substr(offsets[idx])) : std::string();
    }

    bool is_public_suffix(std::string_view host) const {
        auto offsets = label_offsets(host);
        return suffix_label_index(host, offsets) == 0;
    }

    /// eTLD+1: the public suffix plus one label. Errors when the host is
    /// itself a public suffix (no registrable domain exists).
    std::string registrable_domain(std::string_view host) const {
        auto offsets = label_offsets(host);
        std::size_t idx = suffix_label_index(host, offsets);
        if (idx == 0)
            raise(ErrorCode::PublicSuffixOnly,
                  "'" + std::string(host) + "' is a public suffix");
        return std::string(host.substr(offsets[idx - 1]));
    }

private:
    void add_line(std::string_view raw) {
        std::string_view line = trim(raw);
        if (line.empty() || line.starts_with("//")) return;
        // The format reads each line only up to the first whitespace.
        std::size_t ws = line.find_first_of(" \t");
        if (ws != std::string_view::npos) line = line.substr(0, ws);
        if (line == "*") return;  // implicit default rule
        if (line.starts_with("!")) {
            exception_.emplace(line.substr(1));
        } else if (line.starts_with("*.")) {
            wildcard_.emplace(line.substr(2));
        } else {
            exact_.emplace(line);
        }
    }

    static std::vector<std::size_t> label_offsets(std::string_view host) {
        if (host.empty()) raise(ErrorCode::EmptyHost, "empty hostname");
        if (!is_valid_hostname(host))
            raise(ErrorCode::MalformedInput, "invalid hostname '" + std::string(host) + "'");
        std::vector<std::size_t> offsets{0};
        for (std::size_t i = 0; i < host.size(); ++i)
            if (host[i] == '.') offsets.push_back(i + 1);
        return offsets;
    }

    /// Label index where the public suffix of `host` begins. Exception rules
    /// prevail over all others; otherwise the rule matching the most labels
    /// wins; otherwise the implicit "*" rule applies.
    std::size_t suffix_label_index(std::string_view host,
                                   const std::vector<std::size_t>& offsets) const {
        const std::size_t n = offsets.size();
        auto suffix_at = [&](std::size_t p) { return host.substr(offsets[p]); };
        for (std::size_t p = 0; p < n; ++p) {
            if (exception_.count(std::string(suffix_at(p)))) return p + 1;
        }
        for (std::size_t p = 0; p < n; ++p) {
            if (exact_.count(std::string(suffix_at(p)))) return p;
            if (p + 1 < n && wildcard_.count(std::string(suffix_at(p + 1)))) return p;
        }
        return n - 1;
    }

    std::unordered_set<std::string> exact_;
    std::unordered_set<std::string> wildcard_;
    std::unordered_set<std::string> exception_;
};

}  // namespace sitelens
