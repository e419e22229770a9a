#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sitelens/core/base64.hpp"
#include "sitelens/core/csv.hpp"
#include "sitelens/core/hash.hpp"
#include "sitelens/core/rng.hpp"
#include "sitelens/core/strings.hpp"

using namespace sitelens;

TEST_CASE("string helpers") {
    CHECK(to_lower("Example.COM") == "example.com");
    CHECK(trim("  x \t") == "x");
    CHECK(split("a,b,,c", ',') == std::vector<std::string>{"a", "b", "", "c"});
    CHECK(join({"a", "b"}, ".") == "a.b");
    CHECK(contains_whitespace("a b"));
    CHECK_FALSE(contains_whitespace("ab"));
}

TEST_CASE("dot_suffix_match respects label boundaries") {
    CHECK(dot_suffix_match("stats.g.doubleclick.net", "doubleclick.net"));
    CHECK(dot_suffix_match("doubleclick.net", "doubleclick.net"));
    CHECK_FALSE(dot_suffix_match("notdoubleclick.net", "doubleclick.net"));
    CHECK_FALSE(dot_suffix_match("net", "doubleclick.net"));
    CHECK_FALSE(dot_suffix_match("x.com", ""));
}

TEST_CASE("base64 round trip") {
    std::mt19937_64 rng(42);
    for (int n = 0; n < 64; ++n) {
        std::vector<std::uint8_t> data(static_cast<std::size_t>(n));
        for (auto& b : data) b = static_cast<std::uint8_t>(rng() & 0xFF);
        auto enc = base64_encode(data);
        CHECK(base64_decode(enc) == data);
    }
    CHECK(base64_encode(std::string_view("Man")) == "TWFu");
    CHECK(base64_encode(std::string_view("Ma")) == "TWE=");
    CHECK(base64_encode(std::string_view("M")) == "TQ==");
}

TEST_CASE("csv split and escape") {
    CHECK(csv_split("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(csv_split("a,\"b,c\",d") == std::vector<std::string>{"a", "b,c", "d"});
    CHECK(csv_split("\"he said \"\"hi\"\"\",x") == std::vector<std::string>{"he said \"hi\"", "x"});
    CHECK(csv_split("") == std::vector<std::string>{""});
    CHECK_THROWS_AS(csv_split("\"unterminated"), Error);
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_split(csv_escape("quote\"inside"))[0] == "quote\"inside");
}

TEST_CASE("fnv1a64 digest is stable") {
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    CHECK(digest_hex("abc") == hex64(fnv1a64("abc")));
    CHECK(digest_hex("abc") != digest_hex("abd"));
    CHECK(digest_hex("abc").size() == 16);
}

TEST_CASE("bounded_uniform stays in range and is deterministic") {
    std::mt19937_64 a(7), b(7);
    for (int i = 0; i < 1000; ++i) {
        auto va = bounded_uniform(a, 13);
        auto vb = bounded_uniform(b, 13);
        CHECK(va == vb);
        CHECK(va < 13);
    }
}

TEST_CASE("sample_indices draws distinct indices, deterministic under seed") {
    std::mt19937_64 a(99), b(99);
    auto s1 = sample_indices(100, 20, a);
    auto s2 = sample_indices(100, 20, b);
    CHECK(s1 == s2);
    std::set<std::size_t> uniq(s1.begin(), s1.end());
    CHECK(uniq.size() == 20);
    for (auto i : s1) CHECK(i < 100);
    std::mt19937_64 c(1);
    CHECK_THROWS_AS(sample_indices(3, 4, c), Error);
}
