#pragma once
// Book loading and deterministic tokenization. Tokens carry byte offsets into
// the original text; paragraph breaks sit on blank lines and chapter breaks on
// detected heading lines.

#include <optional>
#include <string>
#include <vector>

namespace graphlit {

struct RawBook {
    std::string book_id;
    std::optional<std::string> title;
    std::string text;  // UTF-8
};

struct Token {
    std::string surface;
    int64_t byte_start = 0;  // [byte_start, byte_end)
    int64_t byte_end = 0;
};

struct TokenizedBook {
    std::string book_id;
    std::vector<Token> tokens;
    // Token index that starts a new paragraph. The first paragraph starts at
    // token 0 implicitly and is not listed.
    std::vector<int> paragraph_breaks;
    // Token index that starts a chapter; {0} when no heading matched.
    std::vector<int> chapter_breaks;
    // (first token index, token count) per non-blank input line, used by
    // heading detection.
    std::vector<std::pair<int, int>> line_token_spans;
};

// Whitespace + punctuation-detaching tokenizer. A period stays attached to a
// known honorific abbreviation (Mr., Mrs., Dr., St., Ms., Prof., Rev., Capt.,
// Col., Gen., Lt., Sgt.). Throws on invalid UTF-8, naming the byte offset.
TokenizedBook tokenize(const RawBook& book);

// Fills chapter_breaks by matching heading lines ("CHAPTER <roman|arabic>" or
// "<roman numeral>." on their own line, case-insensitive). Falls back to {0}
// for a non-empty book with no headings.
TokenizedBook detect_chapters(TokenizedBook book);

// Reads one UTF-8 plain-text file; book_id = file stem.
RawBook load_book_file(const std::string& path);

// True if the token is a sentence-final punctuation mark.
bool is_sentence_terminal(const std::string& surface);

// Surface joined by single spaces over [start, end] inclusive.
std::string token_span_surface(const TokenizedBook& book, int start, int end);

}  // namespace graphlit
