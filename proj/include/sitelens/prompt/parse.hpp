#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sitelens/core/countries.hpp"
#include "sitelens/core/strings.hpp"
#include "sitelens/prompt/render.hpp"

namespace sitelens::prompt {

struct Prediction {
    std::vector<std::string> labels;
    std::optional<std::string> country;  // Governmental task: country of the government

    bool operator==(const Prediction&) const = default;
};

/// Validated per-URL answers for one batch. The key set equals the batch's
/// expected URLs exactly.
struct ParsedPredictions {
    std::map<std::string, Prediction> by_url;

    bool operator==(const ParsedPredictions&) const = default;
};

namespace detail {

/// Removes a wrapping markdown code fence (``` or ```json) if present.
inline std::string strip_fences(std::string_view raw) {
    std::string_view s = trim(raw);
    if (s.starts_with("```")) {
        std::size_t eol = s.find('\n');
        if (eol != std::string_view::npos) {
            s = s.substr(eol + 1);
            std::string_view tail = trim(s);
            if (tail.ends_with("```")) {
                std::size_t cut = s.rfind("```");
                s = s.substr(0, cut);
            }
        }
    }
    return std::string(trim(s));
}

inline bool parse_bool_field(const nlohmann::json& value, const std::string& url) {
    if (value.is_boolean()) return value.get<bool>();
    if (value.is_string()) {
        auto lowered = to_lower(value.get<std::string>());
        if (lowered == "true") return true;
        if (lowered == "false") return false;
    }
    raise(ErrorCode::MalformedJson, "gov_site for '" + url + "' is not a boolean");
}

inline std::string canonical_category(const std::string& value,
                                      const std::vector<std::string>& vocabulary,
                                      const std::string& url) {
    auto lowered = to_lower(trim(value));
    for (const auto& candidate : vocabulary)
        if (to_lower(candidate) == lowered) return candidate;
    raise(ErrorCode::InvalidLabel, "category '" + value + "' for '" + url + "'");
}

inline Prediction parse_value(const nlohmann::json& value, const std::string& url,
                              const PromptTemplate& tmpl) {
    Prediction pred;
    switch (tmpl.task) {
        case TaskKind::Governmental: {
            if (!value.is_object())
                raise(ErrorCode::MalformedJson, "answer for '" + url + "' is not an object");
            if (!value.contains("gov_site"))
                raise(ErrorCode::MalformedJson, "answer for '" + url + "' lacks gov_site");
            bool gov = parse_bool_field(value["gov_site"], url);
            pred.labels = {gov ? std::string(kLabelGov) : std::string(kLabelNonGov)};
            if (value.contains("country") && value["country"].is_string()) {
                auto country = value["country"].get<std::string>();
                if (!trim(country).empty()) pred.country = country;
            }
            break;
        }
        case TaskKind::Country: {
            std::string text;
            if (value.is_string()) {
                text = value.get<std::string>();
            } else if (value.is_object() && value.contains("country") &&
                       value["country"].is_string()) {
                text = value["country"].get<std::string>();
            } else {
                raise(ErrorCode::MalformedJson, "answer for '" + url + "' lacks country");
            }
            if (to_lower(trim(text)) == kLabelInternational) {
                pred.labels = {std::string(kLabelInternational)};
            } else if (auto code = resolve_country_code(text)) {
                pred.labels = {*code};
            } else {
                raise(ErrorCode::InvalidLabel, "country '" + text + "' for '" + url + "'");
            }
            break;
        }
        case TaskKind::Category: {
            const nlohmann::json* list = nullptr;
            if (value.is_array()) {
                list = &value;
            } else if (value.is_object() && value.contains("categories") &&
                       value["categories"].is_array()) {
                list = &value["categories"];
            } else {
                raise(ErrorCode::MalformedJson, "answer for '" + url + "' lacks categories");
            }
            if (list->size() != tmpl.labels_per_site)
                raise(ErrorCode::WrongCardinality,
                      "expected " + std::to_string(tmpl.labels_per_site) + " categories for '" +
                          url + "', got " + std::to_string(list->size()));
            for (const auto& item : *list) {
                if (!item.is_string())
                    raise(ErrorCode::MalformedJson,
                          "category entry for '" + url + "' is not a string");
                pred.labels.push_back(
                    canonical_category(item.get<std::string>(), tmpl.labels_vocabulary, url));
            }
            break;
        }
    }
    return pred;
}

}  // namespace detail

/// Parses and validates a model response for one batch. Strips an optional
/// markdown fence, requires a JSON object whose keys equal the expected URLs
/// exactly (the prompt forbids URL modification, so no normalization is
/// applied), and validates labels against the task vocabulary. Every error
/// thrown here marks the batch retryable.
inline ParsedPredictions parse_response(const std::string& raw,
                                        const std::vector<std::string>& expected_urls,
                                        const PromptTemplate& tmpl) {
    auto body = detail::strip_fences(raw);
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        raise(ErrorCode::MalformedJson, "response is not a JSON object");

    std::set<std::string> expected(expected_urls.begin(), expected_urls.end());
    std::vector<std::string> missing;
    for (const auto& url : expected_urls)
        if (!j.contains(url)) missing.push_back(url);
    if (!missing.empty())
        raise(ErrorCode::MissingUrls, "response omits: " + join(missing, ", "));
    std::vector<std::string> extra;
    for (const auto& [key, value] : j.items())
        if (!expected.count(key)) extra.push_back(key);
    if (!extra.empty())
        raise(ErrorCode::ExtraUrls, "response adds unexpected keys: " + join(extra, ", "));

    ParsedPredictions parsed;
    for (const auto& url : expected_urls)
        parsed.by_url[url] = detail::parse_value(j.at(url), url, tmpl);
    return parsed;
}

inline ParsedPredictions parse_response(const std::string& raw, const PromptBundle& bundle,
                                        const PromptTemplate& tmpl) {
    return parse_response(raw, bundle.expected_urls, tmpl);
}

/// Canonical response text for a prediction set; the inverse of
/// parse_response over the schema the prompts request.
inline std::string serialize_predictions(const ParsedPredictions& parsed,
                                         const PromptTemplate& tmpl) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [url, pred] : parsed.by_url) {
        switch (tmpl.task) {
            case TaskKind::Governmental: {
                nlohmann::json value{{"gov_site", pred.labels.front() == kLabelGov}};
                if (pred.country) value["country"] = *pred.country;
                j[url] = value;
                break;
            }
            case TaskKind::Country:
                j[url] = {{"country", pred.labels.front()}};
                break;
            case TaskKind::Category:
                j[url] = {{"categories", pred.labels}};
                break;
        }
    }
    return j.dump();
}

}  // namespace sitelens::prompt
