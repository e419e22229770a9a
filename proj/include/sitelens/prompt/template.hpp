#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sitelens/core/error.hpp"
#include "sitelens/core/hash.hpp"
#include "sitelens/core/record.hpp"

namespace sitelens::prompt {

struct OneShotExample {
    std::string input;      // the example URL
    std::string expected;   // how it is categorized
    std::string rationale;  // the "since ..." clause
};

/// All pieces of a task prompt. Rendering follows a fixed section order:
/// persona, definition, framing + instructions, one-shot example, output
/// format, URL list. A non-empty `skeleton` (a plain-text template with
/// {{definition}}, {{one_shot}} and {{url_list}} placeholders) replaces the
/// canonical assembly.
struct PromptTemplate {
    TaskKind task = TaskKind::Governmental;
    std::string persona;
    std::string definition;
    std::vector<std::string> instructions;
    OneShotExample one_shot;
    std::string output_schema_description;  // the quoted JSON shape
    bool with_screenshots = false;
    std::vector<std::string> labels_vocabulary;
    std::size_t labels_per_site = 1;
    std::string skeleton;

    void validate() const {
        if (labels_per_site != 1 && labels_per_site != 2)
            raise(ErrorCode::ConfigError, "labels_per_site must be 1 or 2");
        if (labels_per_site == 2 && task != TaskKind::Category)
            raise(ErrorCode::ConfigError, "two labels per site is a Category-task mode");
    }

    std::string hash() const {
        std::string blob = std::string(task_name(task)) + "\x1f" + persona + "\x1f" + definition;
        for (const auto& i : instructions) blob += "\x1f" + i;
        blob += "\x1f" + one_shot.input + "\x1f" + one_shot.expected + "\x1f" + one_shot.rationale;
        blob += "\x1f" + output_schema_description;
        blob += with_screenshots ? "\x1fS" : "\x1fU";
        for (const auto& l : labels_vocabulary) blob += "\x1f" + l;
        blob += "\x1f" + std::to_string(labels_per_site) + "\x1f" + skeleton;
        return digest_hex(blob);
    }
};

namespace detail {

inline std::string screenshot_instruction(std::string_view decide_clause, bool with_screenshots) {
    std::string out = with_screenshots ? "Use both the URL and its corresponding screenshot to "
                                       : "Use the URL to ";
    out += decide_clause;
    return out;
}

}  // namespace detail

/// Binary governmental/non-governmental classification prompt. The optional
/// extra instruction counters the common university false positive.
inline PromptTemplate governmental_template(bool with_screenshots, bool university_hint = false) {
    PromptTemplate t;
    t.task = TaskKind::Governmental;
    t.with_screenshots = with_screenshots;
    t.labels_vocabulary = {std::string(kLabelGov), std::string(kLabelNonGov)};
    t.labels_per_site = 1;
    t.persona =
        "You are a classifier used to categorize websites into governmental and "
        "non-governmental websites.";
    t.definition =
        "A governmental website is an official online platform created and maintained by a "
        "government entity, or an organization significantly controlled or owned by a "
        "government. A primary goal of a governmental website must be to deliver government "
        "services, such as announcements, communication, exchange of information, and point "
        "of service to their citizens.";
    t.instructions = {
        "Identify whether the website is a governmental website or not based on our definition.",
        "If it is a governmental website also tell us the country of the government.",
        "Do not modify the provided URLs.",
        detail::screenshot_instruction("decide whether each website is governmental or not.",
                                       with_screenshots),
        "Do not excessively rely on the .gov TLD: although this is likely a strong signal of "
        "governmental websites, some websites are operated by governments, but do not offer "
        "any services to citizens.",
    };
    if (university_hint)
        t.instructions.push_back(
            "Keep in mind that most universities are not significantly run by governments, so "
            "university websites are usually not governmental websites.");
    t.one_shot = {
        "https://www.pagopa.gov.it/",
        "a governmental website",
        "it is run by the Italian government and allows citizens to perform online payments "
        "for governmental services",
    };
    t.output_schema_description =
        "'{<url1>: {gov_site: <true/false>, country: <country (provide only if it is a "
        "governmental website)>}, <url2>: {gov_site: <true/false>, country: <country (provide "
        "only if it is a governmental website)>}, ...}'";
    return t;
}

/// Country-of-primary-audience prompt; answers are alpha-2 codes or
/// "international".
inline PromptTemplate country_template(bool with_screenshots) {
    PromptTemplate t;
    t.task = TaskKind::Country;
    t.with_screenshots = with_screenshots;
    t.labels_vocabulary = {std::string(kLabelInternational)};  // plus any alpha-2 code
    t.labels_per_site = 1;
    t.persona =
        "You are a classifier used to categorize websites by the country of their primary "
        "target audience.";
    t.definition =
        "The country of a website is the country of the audience it primarily serves. "
        "Websites that target a global audience rather than users from a single country are "
        "labeled as international.";
    t.instructions = {
        "Identify the country of the primary target audience of the website based on our "
        "definition.",
        "Reply with the ISO 3166-1 alpha-2 country code, or international for websites "
        "targeting a global audience.",
        "Do not modify the provided URLs.",
        detail::screenshot_instruction("decide the country of each website.", with_screenshots),
        "Do not rely exclusively on the top-level domain: websites under generic top-level "
        "domains like .com can still target a specific country.",
    };
    t.one_shot = {
        "https://www.ebay.co.uk/",
        "GB",
        "it is the British marketplace of eBay and primarily targets users in the United "
        "Kingdom",
    };
    t.output_schema_description =
        "'{<url1>: {country: <ISO 3166-1 alpha-2 code or international>}, <url2>: {country: "
        "<ISO 3166-1 alpha-2 code or international>}, ...}'";
    return t;
}

/// Topical categorization prompt over a closed category list. Two labels per
/// site compensate for under-labeled ground truth; single-label mode matches
/// one-category-per-site taxonomies.
inline PromptTemplate category_template(bool with_screenshots,
                                        const std::vector<std::string>& categories =
                                            default_categories(),
                                        std::size_t labels_per_site = 2) {
    PromptTemplate t;
    t.task = TaskKind::Category;
    t.with_screenshots = with_screenshots;
    t.labels_vocabulary = categories;
    t.labels_per_site = labels_per_site;
    t.persona = "You are a classifier used to categorize websites into topical categories.";
    std::string vocab;
    for (const auto& c : categories) {
        if (!vocab.empty()) vocab += ", ";
        vocab += c;
    }
    t.definition =
        "The category of a website is the primary topic of the content it serves. The "
        "available categories are: " +
        vocab + ".";
    t.instructions = {
        labels_per_site == 2
            ? "Assign to each website the two best-matching categories from the list, ordered "
              "from best to second best."
            : "Assign to each website the single best-matching category from the list.",
        "Use only categories from the provided list, spelled exactly as given.",
        "Do not modify the provided URLs.",
        detail::screenshot_instruction("decide the categories of each website.",
                                       with_screenshots),
    };
    if (labels_per_site == 2) {
        t.one_shot = {
            "https://www.bbc.com/",
            "News and Society",
            "it is the website of a major news broadcaster covering current affairs and "
            "social topics",
        };
        t.output_schema_description =
            "'{<url1>: {categories: [<best category>, <second best category>]}, <url2>: "
            "{categories: [<best category>, <second best category>]}, ...}'";
    } else {
        t.one_shot = {
            "https://www.bbc.com/",
            "News",
            "it is the website of a major news broadcaster",
        };
        t.output_schema_description =
            "'{<url1>: {categories: [<best category>]}, <url2>: {categories: [<best "
            "category>]}, ...}'";
    }
    return t;
}

inline std::string load_skeleton_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open template file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace sitelens::prompt
