#include "graphlit/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace graphlit {

namespace {

const std::set<std::string>& honorific_abbreviations() {
    static const std::set<std::string> set = {"mr.",   "mrs.",  "dr.",  "st.", "ms.",  "prof.",
                                              "rev.",  "capt.", "col.", "gen.", "lt.",  "sgt."};
    return set;
}

std::string ascii_lower(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

// Decodes the UTF-8 codepoint starting at byte i; returns its byte length.
// Throws on malformed input.
int decode_utf8(const std::string& s, size_t i, uint32_t& cp) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    auto bad = [&]() -> int {
        throw std::runtime_error("invalid UTF-8 at byte offset " + std::to_string(i));
    };
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    }
    int len;
    uint32_t v;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        v = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        v = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        v = b0 & 0x07;
    } else {
        return bad();
    }
    if (i + static_cast<size_t>(len) > s.size()) return bad();
    for (int k = 1; k < len; ++k) {
        unsigned char b = static_cast<unsigned char>(s[i + static_cast<size_t>(k)]);
        if ((b & 0xC0) != 0x80) return bad();
        v = (v << 6) | (b & 0x3F);
    }
    if (len == 2 && v < 0x80) return bad();
    if (len == 3 && v < 0x800) return bad();
    if (len == 4 && v < 0x10000) return bad();
    if (v > 0x10FFFF || (v >= 0xD800 && v <= 0xDFFF)) return bad();
    cp = v;
    return len;
}

bool is_space_cp(uint32_t cp) {
    switch (cp) {
        case ' ':
        case '\t':
        case '\r':
        case '\v':
        case '\f':
        case 0x00A0:  // no-break space
        case 0x2002:
        case 0x2003:
        case 0x2009:
        case 0x202F:
        case 0x3000:
            return true;
        default:
            return false;
    }
}

bool is_punct_cp(uint32_t cp) {
    if (cp < 0x80) return std::ispunct(static_cast<int>(cp)) != 0;
    switch (cp) {
        case 0x2018:  // left single quote
        case 0x2019:  // right single quote
        case 0x201C:  // left double quote
        case 0x201D:  // right double quote
        case 0x2013:  // en dash
        case 0x2014:  // em dash
        case 0x2026:  // ellipsis
        case 0x00A1:
        case 0x00BF:
        case 0x00AB:
        case 0x00BB:
            return true;
        default:
            return false;
    }
}

struct Piece {
    size_t byte_start;
    size_t byte_end;
};

// Splits one whitespace-free chunk into tokens by detaching leading and
// trailing punctuation, honoring the honorific-period exception.
void split_chunk(const std::string& text, size_t begin, size_t end, std::vector<Piece>& out) {
    // Codepoint boundaries within the chunk.
    std::vector<size_t> starts;
    std::vector<uint32_t> cps;
    size_t i = begin;
    while (i < end) {
        uint32_t cp;
        int len = decode_utf8(text, i, cp);
        starts.push_back(i);
        cps.push_back(cp);
        i += static_cast<size_t>(len);
    }
    starts.push_back(end);

    size_t lo = 0, hi = cps.size();
    // Leading punctuation, one token per codepoint.
    while (lo < hi && is_punct_cp(cps[lo])) {
        out.push_back({starts[lo], starts[lo + 1]});
        ++lo;
    }
    // Trailing punctuation (collected, emitted after the core token).
    std::vector<Piece> tail;
    while (hi > lo && is_punct_cp(cps[hi - 1])) {
        if (cps[hi - 1] == '.') {
            std::string candidate = ascii_lower(text.substr(starts[lo], starts[hi] - starts[lo]));
            if (honorific_abbreviations().count(candidate)) break;
        }
        tail.push_back({starts[hi - 1], starts[hi]});
        --hi;
    }
    if (hi > lo) out.push_back({starts[lo], starts[hi]});
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) out.push_back(*it);
}

bool is_roman_numeral(const std::string& s) {
    if (s.empty() || s.size() > 7) return false;
    for (char c : s) {
        switch (c) {
            case 'i': case 'v': case 'x': case 'l': case 'c': case 'd': case 'm':
            case 'I': case 'V': case 'X': case 'L': case 'C': case 'D': case 'M':
                break;
            default:
                return false;
        }
    }
    return true;
}

bool is_arabic_numeral(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

}  // namespace

TokenizedBook tokenize(const RawBook& book) {
    const std::string& text = book.text;
    TokenizedBook out;
    out.book_id = book.book_id;

    size_t i = 0;
    bool pending_paragraph_break = false;
    bool line_has_tokens = false;
    int line_first_token = -1;
    int line_token_count = 0;

    auto close_line = [&]() {
        if (line_token_count > 0)
            out.line_token_spans.emplace_back(line_first_token, line_token_count);
        if (!line_has_tokens && !out.tokens.empty()) pending_paragraph_break = true;
        line_has_tokens = false;
        line_first_token = -1;
        line_token_count = 0;
    };

    std::vector<Piece> pieces;
    while (i < text.size()) {
        uint32_t cp;
        int len = decode_utf8(text, i, cp);
        if (cp == '\n') {
            close_line();
            i += static_cast<size_t>(len);
            continue;
        }
        if (is_space_cp(cp)) {
            i += static_cast<size_t>(len);
            continue;
        }
        // Collect a whitespace-free chunk.
        size_t chunk_start = i;
        while (i < text.size()) {
            uint32_t c2;
            int l2 = decode_utf8(text, i, c2);
            if (c2 == '\n' || is_space_cp(c2)) break;
            i += static_cast<size_t>(l2);
        }
        pieces.clear();
        split_chunk(text, chunk_start, i, pieces);
        for (const Piece& p : pieces) {
            if (pending_paragraph_break) {
                out.paragraph_breaks.push_back(static_cast<int>(out.tokens.size()));
                pending_paragraph_break = false;
            }
            if (!line_has_tokens) {
                line_has_tokens = true;
                line_first_token = static_cast<int>(out.tokens.size());
            }
            Token t;
            t.surface = text.substr(p.byte_start, p.byte_end - p.byte_start);
            t.byte_start = static_cast<int64_t>(p.byte_start);
            t.byte_end = static_cast<int64_t>(p.byte_end);
            out.tokens.push_back(std::move(t));
            ++line_token_count;
        }
    }
    close_line();
    return out;
}

TokenizedBook detect_chapters(TokenizedBook book) {
    book.chapter_breaks.clear();
    if (book.tokens.empty()) return book;

    for (const auto& [first, count] : book.line_token_spans) {
        const auto tok = [&](int k) { return ascii_lower(book.tokens[static_cast<size_t>(first + k)].surface); };
        bool matched = false;
        if (count >= 2 && count <= 5 && tok(0) == "chapter") {
            std::string second = tok(1);
            if (is_roman_numeral(second) || is_arabic_numeral(second)) {
                matched = true;
                for (int k = 2; k < count; ++k) {
                    const std::string& s = book.tokens[static_cast<size_t>(first + k)].surface;
                    bool all_punct = !s.empty() && s.find_first_not_of(".:;,-") == std::string::npos;
                    if (!all_punct) {
                        matched = false;
                        break;
                    }
                }
            }
        } else if (count == 2 && is_roman_numeral(book.tokens[static_cast<size_t>(first)].surface) &&
                   book.tokens[static_cast<size_t>(first + 1)].surface == ".") {
            matched = true;
        }
        if (matched) book.chapter_breaks.push_back(first);
    }

    if (book.chapter_breaks.empty()) {
        book.chapter_breaks.push_back(0);
        return book;
    }
    // A heading forces a paragraph boundary so chapter starts stay aligned
    // with paragraph starts.
    for (int brk : book.chapter_breaks) {
        if (brk == 0) continue;
        auto it = std::lower_bound(book.paragraph_breaks.begin(), book.paragraph_breaks.end(), brk);
        if (it == book.paragraph_breaks.end() || *it != brk) book.paragraph_breaks.insert(it, brk);
    }
    return book;
}

RawBook load_book_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open book file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    RawBook book;
    book.text = ss.str();
    // file stem
    size_t slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = name.find_last_of('.');
    book.book_id = dot == std::string::npos ? name : name.substr(0, dot);
    return book;
}

bool is_sentence_terminal(const std::string& surface) {
    return surface == "." || surface == "!" || surface == "?";
}

std::string token_span_surface(const TokenizedBook& book, int start, int end) {
    std::string s;
    for (int k = start; k <= end; ++k) {
        if (k > start) s += ' ';
        s += book.tokens[static_cast<size_t>(k)].surface;
    }
    return s;
}

}  // namespace graphlit
