#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cstool/text.hpp"

using namespace cst;

TEST_CASE("utf8 codepoint split") {
    auto cps = utf8_codepoints("a\xC3\xA9q");  // a é q
    REQUIRE(cps.size() == 3);
    CHECK(cps[0] == "a");
    CHECK(cps[1] == "\xC3\xA9");
    CHECK(cps[2] == "q");
    CHECK(utf8_count("\xE2\x96\x81qu\xC3\xA9") == 4);
    CHECK(utf8_codepoints("").empty());
}

TEST_CASE("normalize lowercases and condenses whitespace") {
    CHECK(normalize_text("Hello  World") == "hello world");
    CHECK(normalize_text("  \t a\nb ") == "a b");
    CHECK(normalize_text("") == "");
    // Latin-1 and Extended-A uppercase
    CHECK(normalize_text("QU\xC3\x89") == "qu\xC3\xA9");          // É -> é
    CHECK(normalize_text("\xC4\x8C""esk\xC3\x81") == "\xC4\x8D""esk\xC3\xA1");  // Č -> č, Á -> á
}

TEST_CASE("normalize is idempotent") {
    for (const char* s : {"hola qué tal", "a  b\tc", "MiXeD CaSe", "ñÑ üÜ"}) {
        std::string once = normalize_text(s);
        CHECK(normalize_text(once) == once);
    }
}

TEST_CASE("split_words") {
    auto w = split_words(" one two\tthree ");
    REQUIRE(w.size() == 3);
    CHECK(w[0] == "one");
    CHECK(w[2] == "three");
    CHECK(split_words("   ").empty());
}
