#pragma once

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sitelens/core/strings.hpp"
#include "sitelens/core/url.hpp"

namespace sitelens::crawl {

namespace detail {

struct TagScan {
    std::string name;       // lowercase, without the leading '/'
    bool closing = false;
    std::size_t attrs_begin = 0;  // offset just past the tag name
};

inline bool tag_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-';
}

/// Reads the tag at `pos` (which points at '<'). Returns the position just
/// past the tag name, or npos for non-tags ("<3", "<!...").
inline std::size_t read_tag(std::string_view html, std::size_t pos, TagScan& out) {
    std::size_t i = pos + 1;
    if (i < html.size() && html[i] == '/') {
        out.closing = true;
        ++i;
    } else {
        out.closing = false;
    }
    std::size_t name_start = i;
    while (i < html.size() && tag_name_char(html[i])) ++i;
    if (i == name_start) return std::string_view::npos;
    out.name = to_lower(html.substr(name_start, i - name_start));
    out.attrs_begin = i;
    return i;
}

/// Case-insensitive attribute lookup inside one tag; understands single,
/// double and missing quotes. Returns the raw value; empty when absent.
inline std::string attribute_value(std::string_view html, std::size_t attrs_begin,
                                   std::size_t tag_end, std::string_view wanted) {
    std::size_t i = attrs_begin;
    while (i < tag_end) {
        while (i < tag_end &&
               (std::isspace(static_cast<unsigned char>(html[i])) || html[i] == '/'))
            ++i;
        if (i >= tag_end) break;
        std::size_t name_start = i;
        while (i < tag_end && html[i] != '=' && html[i] != '>' &&
               !std::isspace(static_cast<unsigned char>(html[i])))
            ++i;
        std::string name = to_lower(html.substr(name_start, i - name_start));
        while (i < tag_end && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
        std::string value;
        if (i < tag_end && html[i] == '=') {
            ++i;
            while (i < tag_end && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
            if (i < tag_end && (html[i] == '"' || html[i] == '\'')) {
                char quote = html[i++];
                std::size_t value_start = i;
                while (i < tag_end && html[i] != quote) ++i;
                value = std::string(html.substr(value_start, i - value_start));
                if (i < tag_end) ++i;
            } else {
                std::size_t value_start = i;
                while (i < tag_end && html[i] != '>' &&
                       !std::isspace(static_cast<unsigned char>(html[i])))
                    ++i;
                value = std::string(html.substr(value_start, i - value_start));
            }
        }
        if (name == wanted) return value;
        if (name.empty()) ++i;  // stray character; keep moving
    }
    return {};
}

}  // namespace detail

/// Hostnames of script src attributes under <body>, deduplicated in document
/// order. Relative and scheme-relative srcs resolve against the page URL
/// (first-party script hosts are in scope). Lenient: comments are skipped,
/// fragments that do not parse are ignored, head-only scripts never count.
inline std::vector<std::string> extract_body_scripts(std::string_view html,
                                                     const UrlParts& page_url) {
    std::vector<std::string> hosts;
    std::set<std::string> seen;
    bool in_body = false;
    std::size_t i = 0;
    while (i < html.size()) {
        std::size_t lt = html.find('<', i);
        if (lt == std::string_view::npos) break;
        if (html.compare(lt, 4, "<!--") == 0) {
            std::size_t end = html.find("-->", lt + 4);
            i = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        detail::TagScan tag;
        std::size_t after_name = detail::read_tag(html, lt, tag);
        if (after_name == std::string_view::npos) {
            i = lt + 1;
            continue;
        }
        std::size_t tag_end = html.find('>', after_name);
        if (tag_end == std::string_view::npos) tag_end = html.size();

        if (tag.name == "body") {
            if (tag.closing && in_body) break;
            if (!tag.closing) in_body = true;
        } else if (in_body && !tag.closing && tag.name == "script") {
            auto src = detail::attribute_value(html, tag.attrs_begin, tag_end, "src");
            if (!src.empty()) {
                if (auto host = resolve_reference_host(src, page_url)) {
                    if (seen.insert(*host).second) hosts.push_back(*host);
                }
            }
        }
        i = tag_end + 1;
    }
    return hosts;
}

inline std::vector<std::string> extract_body_scripts(std::string_view html,
                                                     const std::string& page_url) {
    return extract_body_scripts(html, parse_url(page_url));
}

}  // namespace sitelens::crawl
