#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>

#include "graphlit/mentions.hpp"
#include "graphlit/text.hpp"

using namespace graphlit;

namespace {

std::vector<std::string> surfaces(const TokenizedBook& b) {
    std::vector<std::string> out;
    for (const auto& t : b.tokens) out.push_back(t.surface);
    return out;
}

TokenizedBook tok(const std::string& text, const std::string& id = "b") {
    RawBook rb;
    rb.book_id = id;
    rb.text = text;
    return tokenize(rb);
}

}  // namespace

TEST_CASE("honorific period stays attached") {
    auto b = tok("Mr. Darcy spoke.");
    CHECK(surfaces(b) == std::vector<std::string>{"Mr.", "Darcy", "spoke", "."});
}

TEST_CASE("empty input gives empty outputs") {
    auto b = tok("");
    CHECK(b.tokens.empty());
    CHECK(b.paragraph_breaks.empty());
    CHECK(b.chapter_breaks.empty());
}

TEST_CASE("blank line starts a paragraph") {
    auto b = tok("A b.\n\nC");
    CHECK(surfaces(b) == std::vector<std::string>{"A", "b", ".", "C"});
    CHECK(b.paragraph_breaks == std::vector<int>{3});
}

TEST_CASE("single newlines do not break paragraphs") {
    auto b = tok("one two\nthree four\n\nfive");
    CHECK(b.paragraph_breaks == std::vector<int>{4});
}

TEST_CASE("tokenize is deterministic and span surfaces reconstruct") {
    std::string text = "\xE2\x80\x9CWhy, Mr. Bennet!\xE2\x80\x9D she said; don't go.";
    auto a = tok(text);
    auto b = tok(text);
    REQUIRE(a.tokens.size() == b.tokens.size());
    for (size_t i = 0; i < a.tokens.size(); ++i) {
        CHECK(a.tokens[i].surface == b.tokens[i].surface);
        CHECK(a.tokens[i].byte_start == b.tokens[i].byte_start);
        // Spans slice the original text exactly.
        CHECK(text.substr(static_cast<size_t>(a.tokens[i].byte_start),
                          static_cast<size_t>(a.tokens[i].byte_end - a.tokens[i].byte_start)) ==
              a.tokens[i].surface);
    }
    CHECK(a.tokens[1].surface == "Why");
    CHECK(a.tokens[3].surface == "Mr.");
    CHECK(a.tokens[4].surface == "Bennet");
    // Apostrophes stay internal.
    bool found = false;
    for (auto& t : a.tokens) found = found || t.surface == "don't";
    CHECK(found);
}

TEST_CASE("token spans strictly increase and never overlap") {
    auto b = tok("Alpha, beta; gamma. (Delta!) \"epsilon\" zeta--eta.");
    for (size_t i = 1; i < b.tokens.size(); ++i)
        CHECK(b.tokens[i].byte_start >= b.tokens[i - 1].byte_end);
}

TEST_CASE("invalid utf8 names the byte offset") {
    RawBook rb;
    rb.book_id = "x";
    rb.text = "ok \xFF bad";
    CHECK_THROWS_WITH_AS(tokenize(rb), doctest::Contains("byte offset 3"), std::runtime_error);
}

TEST_CASE("chapter headings are detected") {
    auto b = detect_chapters(tok("CHAPTER I\n\nIt begins.\n\nCHAPTER II\n\nIt continues."));
    REQUIRE(b.chapter_breaks.size() == 2);
    CHECK(b.tokens[static_cast<size_t>(b.chapter_breaks[0])].surface == "CHAPTER");
    CHECK(b.tokens[static_cast<size_t>(b.chapter_breaks[1])].surface == "CHAPTER");
    CHECK(b.chapter_breaks[1] > b.chapter_breaks[0]);
}

TEST_CASE("no headings falls back to a single chapter at zero") {
    auto b = detect_chapters(tok("Just some ordinary text.\n\nMore text."));
    CHECK(b.chapter_breaks == std::vector<int>{0});
}

TEST_CASE("lowercase chapter heading is matched case-insensitively") {
    auto b = detect_chapters(tok("intro words\n\nChapter 12\n\nbody text"));
    REQUIRE(b.chapter_breaks.size() == 1);
    CHECK(b.tokens[static_cast<size_t>(b.chapter_breaks[0])].surface == "Chapter");
    CHECK(b.chapter_breaks[0] != 0);
}

TEST_CASE("roman numeral heading on its own line") {
    auto b = detect_chapters(tok("IV.\n\nSomething happened."));
    CHECK(b.chapter_breaks == std::vector<int>{0});
    auto c = detect_chapters(tok("start text\n\nIV.\n\nSomething happened."));
    REQUIRE(c.chapter_breaks.size() == 1);
    CHECK(c.tokens[static_cast<size_t>(c.chapter_breaks[0])].surface == "IV");
}

TEST_CASE("chapter breaks are paragraph-aligned") {
    auto b = detect_chapters(tok("Front matter.\n\nCHAPTER I\n\ntext here\n\nCHAPTER II\n\nmore"));
    for (int brk : b.chapter_breaks) {
        bool at_paragraph =
            brk == 0 || std::find(b.paragraph_breaks.begin(), b.paragraph_breaks.end(), brk) !=
                            b.paragraph_breaks.end();
        CHECK(at_paragraph);
    }
}

TEST_CASE("ingest mentions from standoff jsonl") {
    auto b = tok("a b c d e f g h i j Elizabeth Bennet walks on.");
    std::string path = "standoff_test.jsonl";
    {
        std::ofstream out(path);
        out << R"({"book_id":"b","start_token":10,"end_token":11,"surface":"Elizabeth Bennet"})" << "\n";
        out << R"({"book_id":"other","start_token":0,"end_token":0,"surface":"x"})" << "\n";
    }
    auto mentions = ingest_mentions(b, path);
    REQUIRE(mentions.size() == 1);
    CHECK(mentions[0].token_start == 10);
    CHECK(mentions[0].token_end == 11);
    CHECK(mentions[0].surface == "Elizabeth Bennet");
    CHECK(mentions[0].source == MentionSource::Ingested);
    std::remove(path.c_str());
}

TEST_CASE("empty standoff file gives no mentions") {
    auto b = tok("hello world");
    std::string path = "standoff_empty.jsonl";
    { std::ofstream out(path); }
    CHECK(ingest_mentions(b, path).empty());
    std::remove(path.c_str());
}

TEST_CASE("out of range standoff index names the line") {
    auto b = tok("short text only");
    std::string path = "standoff_bad.jsonl";
    {
        std::ofstream out(path);
        out << R"({"book_id":"b","start_token":1000000000,"end_token":1000000000,"surface":"x"})" << "\n";
    }
    CHECK_THROWS_WITH_AS(ingest_mentions(b, path), doctest::Contains(":1:"), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("malformed standoff line names the line") {
    auto b = tok("short text only");
    std::string path = "standoff_malformed.jsonl";
    {
        std::ofstream out(path);
        out << R"({"book_id":"b","start_token":0,"end_token":0})" << "\n";
        out << "{{{" << "\n";
    }
    CHECK_THROWS_WITH_AS(ingest_mentions(b, path), doctest::Contains(":2:"), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("fallback tagger finds honorific-led names") {
    auto gaz = Gazetteers::builtin();
    auto b = tok("She saw Mr. Darcy there.");
    auto mentions = fallback_tag_mentions(b, gaz);
    REQUIRE(mentions.size() == 1);
    CHECK(mentions[0].surface == "Mr. Darcy");
    CHECK(mentions[0].source == MentionSource::GazetteerTagged);
}

TEST_CASE("fallback tagger ignores plain sentences") {
    auto gaz = Gazetteers::builtin();
    auto b = tok("The end.");
    CHECK(fallback_tag_mentions(b, gaz).empty());
}

TEST_CASE("fallback tagger skips all-caps and start-of-text tokens") {
    auto gaz = Gazetteers::builtin();
    auto b = tok("PARIS was bright. Anna left.");
    auto mentions = fallback_tag_mentions(b, gaz);
    REQUIRE(mentions.size() == 1);
    CHECK(mentions[0].surface == "Anna");
}

TEST_CASE("mention surfaces equal reconstructed token spans") {
    auto gaz = Gazetteers::builtin();
    auto b = tok("Later on, Elizabeth Bennet met Mr. Darcy near the park.");
    for (const auto& m : fallback_tag_mentions(b, gaz))
        CHECK(m.surface == token_span_surface(b, m.token_start, m.token_end));
}
