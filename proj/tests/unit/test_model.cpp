#include <catch2/catch_amalgamated.hpp>

#include "sitelens/core/countries.hpp"
#include "sitelens/core/public_suffix.hpp"
#include "sitelens/core/record.hpp"
#include "sitelens/core/url.hpp"
#include "support/paths.hpp"
#include "support/psl_vectors.hpp"

using namespace sitelens;

namespace {

const PublicSuffixTable& psl() {
    static PublicSuffixTable table =
        PublicSuffixTable::from_file((testing::fixtures_dir() / "psl_test.dat").string());
    return table;
}

}  // namespace

TEST_CASE("parse_url handles bare domains, schemes and ports") {
    auto p = parse_url("Example.COM");
    CHECK(p.scheme == "https");
    CHECK(p.host == "example.com");
    CHECK(p.path_etc.empty());

    p = parse_url("http://User@Sub.Example.com:8080/Path?q=1#frag");
    CHECK(p.scheme == "http");
    CHECK(p.host == "sub.example.com");
    CHECK(p.port == "8080");
    CHECK(p.path_etc == "/Path?q=1#frag");
    CHECK(format_url(p) == "http://sub.example.com:8080/Path?q=1#frag");

    CHECK(parse_url("//cdn.example.net/x.js").host == "cdn.example.net");
    CHECK(parse_url("example.com.").host == "example.com");

    CHECK_THROWS_AS(parse_url("http://a b.com"), Error);
    CHECK_THROWS_AS(parse_url(""), Error);
    CHECK_THROWS_AS(parse_url("http:///nohost"), Error);
    CHECK_THROWS_AS(parse_url("ftp://example.com"), Error);
    CHECK_THROWS_AS(parse_url("https://exa..mple.com"), Error);
    CHECK_THROWS_AS(parse_url("https://host:12ab/"), Error);
}

TEST_CASE("resolve_reference_host") {
    UrlParts base = parse_url("https://site.org/page/index.html");
    CHECK(resolve_reference_host("https://a.com/x.js", base) == "a.com");
    CHECK(resolve_reference_host("//b.net/z.js", base) == "b.net");
    CHECK(resolve_reference_host("/app.js", base) == "site.org");
    CHECK(resolve_reference_host("app.js", base) == "site.org");
    CHECK(resolve_reference_host("../lib/app.js", base) == "site.org");
    CHECK_FALSE(resolve_reference_host("data:text/javascript,alert(1)", base).has_value());
    CHECK_FALSE(resolve_reference_host("javascript:void(0)", base).has_value());
    CHECK_FALSE(resolve_reference_host("", base).has_value());
}

TEST_CASE("public suffix rules: exact, wildcard, exception") {
    const auto& table = psl();
    CHECK(table.rule_count() > 30);

    CHECK(table.registrable_domain("sub.shop.example.com") == "example.com");
    CHECK(table.registrable_domain("ebay.co.uk") == "ebay.co.uk");
    CHECK(table.registrable_domain("foo.gov.it") == "foo.gov.it");
    CHECK(table.public_suffix("foo.gov.it") == "gov.it");

    // Wildcard *.kobe.jp with exception !city.kobe.jp.
    CHECK(table.registrable_domain("a.b.c.kobe.jp") == "b.c.kobe.jp");
    CHECK(table.registrable_domain("www.city.kobe.jp") == "city.kobe.jp");
    CHECK(table.is_public_suffix("c.kobe.jp"));
    CHECK_FALSE(table.is_public_suffix("city.kobe.jp"));

    // Unknown TLD falls back to the last two labels.
    CHECK(table.registrable_domain("foo.bar.unknowntld") == "bar.unknowntld");

    CHECK_THROWS_AS(table.registrable_domain("co.uk"), Error);
    CHECK_THROWS_AS(table.registrable_domain(""), Error);
    CHECK_THROWS_AS(table.registrable_domain("localhost"), Error);
    try {
        table.registrable_domain("co.uk");
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PublicSuffixOnly);
    }
}

TEST_CASE("public suffix table parses comments and whitespace") {
    auto table = PublicSuffixTable::from_string(
        "// comment line\n"
        "\n"
        "com\n"
        "  \t\n"
        "co.uk extra-tokens-ignored\n"
        "*.ck\n"
        "!www.ck\n");
    CHECK(table.rule_count() == 4);
    CHECK(table.registrable_domain("x.co.uk") == "x.co.uk");
}

TEST_CASE("checkPublicSuffix vector spot checks") {
    const auto& table = psl();
    for (const auto& [input, expected] : testing::public_suffix_vectors()) {
        std::string lowered = to_lower(input);
        std::string got;
        try {
            got = table.registrable_domain(lowered);
        } catch (const Error&) {
            got.clear();
        }
        INFO("input: " << input);
        CHECK(got == expected);
    }
}

TEST_CASE("registrable domain is a one-label extension of the public suffix") {
    const auto& table = psl();
    for (std::string host : {"a.b.example.com", "x.www.ck", "deep.a.b.c.kobe.jp",
                             "shop.example.uk.com", "k.test.ak.us"}) {
        auto reg = table.registrable_domain(host);
        auto suffix = table.public_suffix(host);
        CHECK(dot_suffix_match(host, reg));
        CHECK(dot_suffix_match(reg, suffix));
        auto reg_labels = split(reg, '.').size();
        auto suffix_labels = split(suffix, '.').size();
        CHECK(reg_labels == suffix_labels + 1);
    }
}

TEST_CASE("normalize_url builds records") {
    auto rec = normalize_url("Example.COM", psl());
    CHECK(rec.url == "https://example.com");
    CHECK(rec.host == "example.com");
    CHECK(rec.registrable_domain == "example.com");
    CHECK(rec.labels.empty());
    CHECK(rec.predictions.empty());
    CHECK_FALSE(rec.tranco_rank.has_value());

    CHECK(normalize_url("ebay.co.uk", psl()).registrable_domain == "ebay.co.uk");
    CHECK_THROWS_AS(normalize_url("http://a b.com", psl()), Error);
}

TEST_CASE("normalize_url is idempotent") {
    for (std::string raw : {"Example.COM", "http://Sub.X.co.uk/path?q=1", "ebay.co.uk",
                            "https://a.b.c.kobe.jp:8443/z"}) {
        auto first = normalize_url(raw, psl());
        auto second = normalize_url(first.url, psl());
        CHECK(first == second);
    }
}

TEST_CASE("same-site relation follows registrable domains") {
    auto a = normalize_url("www.example.co.uk", psl());
    auto b = normalize_url("shop.example.co.uk", psl());
    auto c = normalize_url("example.com", psl());
    CHECK(a.registrable_domain == b.registrable_domain);
    CHECK(a.registrable_domain != c.registrable_domain);
}

TEST_CASE("task names and vocabularies") {
    CHECK(task_name(TaskKind::Governmental) == "governmental");
    CHECK(task_from_name("country") == TaskKind::Country);
    CHECK_THROWS_AS(task_from_name("bogus"), Error);

    CHECK(is_valid_label(TaskKind::Governmental, "gov"));
    CHECK(is_valid_label(TaskKind::Governmental, "non-gov"));
    CHECK_FALSE(is_valid_label(TaskKind::Governmental, "maybe"));

    CHECK(is_valid_label(TaskKind::Country, "DE"));
    CHECK(is_valid_label(TaskKind::Country, "international"));
    CHECK_FALSE(is_valid_label(TaskKind::Country, "XX"));
    CHECK_FALSE(is_valid_label(TaskKind::Country, "Germany"));

    CHECK(default_categories().size() == 14);
    CHECK(is_valid_label(TaskKind::Category, "Kids_and_Teens"));
    CHECK_FALSE(is_valid_label(TaskKind::Category, "Gardening"));
    CHECK(is_valid_label(TaskKind::Category, "Blogs", {"Blogs", "Wiki"}));

    CHECK(max_predictions(TaskKind::Category) == 2);
    CHECK(max_predictions(TaskKind::Country) == 1);
}

TEST_CASE("country resolution") {
    CHECK(resolve_country_code("DE") == "DE");
    CHECK(resolve_country_code("de") == "DE");
    CHECK(resolve_country_code("Italy") == "IT");
    CHECK(resolve_country_code("UNITED KINGDOM") == "GB");
    CHECK(resolve_country_code("viet nam") == "VN");
    CHECK_FALSE(resolve_country_code("Atlantis").has_value());
    CHECK_FALSE(resolve_country_code("").has_value());
    CHECK(iso_alpha2_codes().size() == 249);
}
