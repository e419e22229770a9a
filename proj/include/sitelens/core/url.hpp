#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "sitelens/core/error.hpp"
#include "sitelens/core/strings.hpp"

namespace sitelens {

struct UrlParts {
    std::string scheme;     // lowercase
    std::string host;       // lowercase, no port, no trailing dot
    std::string port;       // empty when absent
    std::string path_etc;   // path + query + fragment, verbatim ("" when absent)
};

/// Accepts ASCII hostnames: dot-separated labels of alphanumerics, '-' and
/// '_', each 1..63 chars, total <= 253. Rejects empty labels and whitespace.
inline bool is_valid_hostname(std::string_view host) {
    if (host.empty() || host.size() > 253) return false;
    std::size_t label_len = 0;
    for (char ch : host) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (c == '.') {
            if (label_len == 0) return false;
            label_len = 0;
            continue;
        }
        if (!(std::isalnum(c) || c == '-' || c == '_')) return false;
        if (++label_len > 63) return false;
    }
    return label_len > 0;  // no trailing dot at this point
}

/// Parses an absolute http(s) URL or a bare domain (scheme defaults to
/// https). Lowercases scheme and host, strips a single trailing dot from
/// the host. Throws malformed-input on anything else.
inline UrlParts parse_url(std::string_view raw) {
    std::string_view s = trim(raw);
    if (s.empty()) raise(ErrorCode::MalformedInput, "empty URL");
    if (contains_whitespace(s)) raise(ErrorCode::MalformedInput, "URL contains whitespace: '" + std::string(raw) + "'");

    UrlParts parts;
    std::size_t scheme_end = s.find("://");
    if (s.starts_with("//")) {
        parts.scheme = "https";
        s.remove_prefix(2);
    } else if (scheme_end != std::string_view::npos) {
        parts.scheme = to_lower(s.substr(0, scheme_end));
        if (parts.scheme != "http" && parts.scheme != "https")
            raise(ErrorCode::MalformedInput, "unsupported scheme '" + parts.scheme + "'");
        s.remove_prefix(scheme_end + 3);
    } else {
        parts.scheme = "https";
    }

    std::size_t authority_end = s.find_first_of("/?#");
    std::string_view authority = s.substr(0, authority_end);
    if (authority_end != std::string_view::npos) parts.path_etc = std::string(s.substr(authority_end));

    // Drop userinfo if present.
    std::size_t at = authority.rfind('@');
    if (at != std::string_view::npos) authority = authority.substr(at + 1);

    std::size_t colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
        std::string_view port = authority.substr(colon + 1);
        for (char c : port)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                raise(ErrorCode::MalformedInput, "invalid port in '" + std::string(raw) + "'");
        parts.port = std::string(port);
        authority = authority.substr(0, colon);
    }

    std::string host = to_lower(authority);
    if (!host.empty() && host.back() == '.') host.pop_back();
    if (!is_valid_hostname(host))
        raise(ErrorCode::MalformedInput, "invalid hostname in '" + std::string(raw) + "'");
    parts.host = std::move(host);
    return parts;
}

inline std::string format_url(const UrlParts& parts) {
    std::string out = parts.scheme + "://" + parts.host;
    if (!parts.port.empty()) out += ":" + parts.port;
    out += parts.path_etc;
    return out;
}

/// Host of a script src as the browser would resolve it against a base URL:
/// absolute URLs carry their own host, "//host/..." is scheme-relative,
/// anything else is relative and stays on the base host. Returns nullopt
/// for non-http(s) schemes (data:, javascript:, ...) and malformed values.
inline std::optional<std::string> resolve_reference_host(std::string_view ref, const UrlParts& base) {
    std::string_view s = trim(ref);
    if (s.empty()) return std::nullopt;
    std::size_t colon = s.find(':');
    std::size_t slash = s.find('/');
    bool has_scheme = colon != std::string_view::npos && (slash == std::string_view::npos || colon < slash);
    try {
        if (s.starts_with("//") || has_scheme) return parse_url(s).host;
        return base.host;
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace sitelens
