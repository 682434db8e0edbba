#include <doctest.h>

#include "recall/text.hpp"

using namespace recall;

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
    CHECK(tokenize("Jon's group, performing!") ==
          std::vector<std::string>{"jon", "s", "group", "performing"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("  ") == std::vector<std::string>{});
    CHECK(tokenize("a1 b2") == std::vector<std::string>{"a1", "b2"});
}

TEST_CASE("normalize_text strips punctuation and case") {
    CHECK(normalize_text("February, 2023") == "february 2023");
    CHECK(normalize_text("  A  B ") == "a b");
}

TEST_CASE("contains_token_seq needs contiguous whole tokens") {
    auto hay = tokenize("Gina supports Jon every day");
    CHECK(contains_token_seq(hay, tokenize("Jon")));
    CHECK(contains_token_seq(hay, tokenize("supports Jon")));
    CHECK_FALSE(contains_token_seq(hay, tokenize("Gin")));
    CHECK_FALSE(contains_token_seq(hay, tokenize("Jon every missing")));
    CHECK_FALSE(contains_token_seq(hay, {}));
}

TEST_CASE("entity_matches is whole-token and case-insensitive") {
    CHECK(entity_matches("Gina supports Jon", "jon"));
    CHECK(entity_matches("New York trip", "new york"));
    CHECK_FALSE(entity_matches("Gina dances", "Gin"));
    CHECK_FALSE(entity_matches("Jonathan dances", "Jon"));
}

TEST_CASE("split_lines keeps empty lines and strips CR") {
    auto lines = split_lines("a\r\nb\n\nc");
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "a");
    CHECK(lines[1] == "b");
    CHECK(lines[2] == "");
    CHECK(lines[3] == "c");
}

TEST_CASE("trim and join") {
    CHECK(trim("  x \t") == "x");
    CHECK(join({"a", "b"}, ", ") == "a, b");
    CHECK(join({}, ", ") == "");
}
