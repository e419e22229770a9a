#pragma once

#include <string>
#include <vector>

#include "sitelens/prompt/template.hpp"

namespace sitelens::prompt {

/// A rendered prompt: final text, screenshots aligned with the URL order,
/// and the URLs whose answers the response must contain.
struct PromptBundle {
    std::string text;
    std::vector<std::vector<std::uint8_t>> images;
    std::vector<std::string> expected_urls;
    std::string template_hash;
};

namespace detail {

inline std::string one_shot_sentence(const OneShotExample& ex) {
    return "For example, " + ex.input + " would be categorized as " + ex.expected + ", since " +
           ex.rationale + ".";
}

inline std::string url_list_header(bool with_screenshots) {
    return with_screenshots ? "Here is the list of websites together with their screenshot:"
                            : "Here is the list of websites:";
}

inline std::string replace_all(std::string text, std::string_view needle,
                               const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return text;
}

inline std::string assemble(const PromptTemplate& tmpl, const std::string& definition_text,
                            const std::string& one_shot_text, const std::string& url_text) {
    std::string text = tmpl.persona + "\n";
    text += definition_text + "\n";
    text +=
        "You are used by a research team conducting web measurements. You will be given a "
        "list of websites. For each website:\n";
    for (const auto& instruction : tmpl.instructions) text += "- " + instruction + "\n";
    text += one_shot_text + "\n";
    text += "Please analyze all websites and give an answer for all of them.\n";
    text += "Reply with the following json format: " + tmpl.output_schema_description +
            " and nothing else.\n";
    text += url_list_header(tmpl.with_screenshots) + "\n";
    text += url_text;
    return text;
}

}  // namespace detail

/// The canonical prompt frame as an editable skeleton file: the variable
/// sections appear as {{definition}}, {{one_shot}} and {{url_list}}
/// placeholders. Rendering a template through its own canonical skeleton
/// reproduces the built-in assembly exactly.
inline std::string canonical_skeleton(const PromptTemplate& tmpl) {
    return detail::assemble(tmpl, "{{definition}}", "{{one_shot}}", "{{url_list}}");
}

/// Renders a prompt for a batch. Deterministic: identical inputs produce
/// byte-identical text. When the template requires screenshots there must be
/// one non-empty PNG per record, in batch order.
inline PromptBundle render(const PromptTemplate& tmpl, const std::vector<WebsiteRecord>& batch,
                           std::vector<std::vector<std::uint8_t>> screenshots = {}) {
    tmpl.validate();
    if (batch.empty()) raise(ErrorCode::EmptyBatch, "render called with an empty batch");
    if (tmpl.with_screenshots) {
        if (screenshots.size() != batch.size())
            raise(ErrorCode::MissingScreenshot,
                  "need " + std::to_string(batch.size()) + " screenshots, got " +
                      std::to_string(screenshots.size()));
        for (std::size_t i = 0; i < batch.size(); ++i)
            if (screenshots[i].empty())
                raise(ErrorCode::MissingScreenshot,
                      "no screenshot for '" + batch[i].url + "'");
    } else {
        screenshots.clear();
    }

    PromptBundle bundle;
    bundle.images = std::move(screenshots);
    bundle.template_hash = tmpl.hash();
    for (const auto& rec : batch) bundle.expected_urls.push_back(rec.url);

    std::string url_lines;
    for (const auto& url : bundle.expected_urls) url_lines += url + "\n";

    if (!tmpl.skeleton.empty()) {
        std::string text = tmpl.skeleton;
        text = detail::replace_all(std::move(text), "{{definition}}", tmpl.definition);
        text = detail::replace_all(std::move(text), "{{one_shot}}",
                                   detail::one_shot_sentence(tmpl.one_shot));
        text = detail::replace_all(std::move(text), "{{url_list}}", url_lines);
        bundle.text = std::move(text);
        return bundle;
    }

    bundle.text = detail::assemble(tmpl, tmpl.definition,
                                   detail::one_shot_sentence(tmpl.one_shot), url_lines);
    return bundle;
}

}  // namespace sitelens::prompt
