#include "graphlit/mentions.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace graphlit {

std::vector<MentionSpan> ingest_mentions(const TokenizedBook& book, const std::string& standoff_path) {
    std::ifstream in(standoff_path);
    if (!in) throw std::runtime_error("cannot open standoff mention file: " + standoff_path);
    std::vector<MentionSpan> mentions;
    std::string line;
    int line_no = 0;
    const int n_tokens = static_cast<int>(book.tokens.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error(standoff_path + ":" + std::to_string(line_no) +
                                     ": malformed JSON line (" + e.what() + ")");
        }
        if (!j.is_object() || !j.contains("book_id") || !j.contains("start_token") ||
            !j.contains("end_token"))
            throw std::runtime_error(standoff_path + ":" + std::to_string(line_no) +
                                     ": expected fields book_id, start_token, end_token");
        if (j["book_id"].get<std::string>() != book.book_id) continue;
        int64_t start = j["start_token"].get<int64_t>();
        int64_t end = j["end_token"].get<int64_t>();
        if (start < 0 || end < start || end >= n_tokens)
            throw std::runtime_error(standoff_path + ":" + std::to_string(line_no) +
                                     ": token span [" + std::to_string(start) + "," +
                                     std::to_string(end) + "] out of range for a " +
                                     std::to_string(n_tokens) + "-token book");
        MentionSpan m;
        m.token_start = static_cast<int>(start);
        m.token_end = static_cast<int>(end);
        m.surface = token_span_surface(book, m.token_start, m.token_end);
        m.source = MentionSource::Ingested;
        mentions.push_back(std::move(m));
    }
    std::stable_sort(mentions.begin(), mentions.end(),
                     [](const MentionSpan& a, const MentionSpan& b) { return a.token_start < b.token_start; });
    return mentions;
}

namespace {

// Initial uppercase with at least one lowercase letter afterwards; rejects
// all-caps heading words and bare initials.
bool is_name_capitalized(const std::string& s) {
    if (s.empty()) return false;
    unsigned char first = static_cast<unsigned char>(s[0]);
    if (first < 'A' || first > 'Z') return false;
    bool has_lower = false;
    for (size_t i = 1; i < s.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (c >= 'a' && c <= 'z') has_lower = true;
    }
    return has_lower;
}

}  // namespace

std::vector<MentionSpan> fallback_tag_mentions(const TokenizedBook& book, const Gazetteers& gazetteers) {
    std::vector<MentionSpan> mentions;
    const int n = static_cast<int>(book.tokens.size());
    std::set<int> paragraph_starts(book.paragraph_breaks.begin(), book.paragraph_breaks.end());
    paragraph_starts.insert(0);

    int i = 0;
    while (i < n) {
        const std::string& surface = book.tokens[static_cast<size_t>(i)].surface;
        bool honorific_lead = gazetteers.is_honorific(surface) && i + 1 < n &&
                              is_name_capitalized(book.tokens[static_cast<size_t>(i + 1)].surface);
        bool cap = is_name_capitalized(surface) && !gazetteers.is_honorific(surface);
        if (!honorific_lead && !cap) {
            ++i;
            continue;
        }
        if (!honorific_lead && paragraph_starts.count(i)) {
            ++i;
            continue;
        }
        int start = i;
        if (honorific_lead) ++i;
        while (i < n && is_name_capitalized(book.tokens[static_cast<size_t>(i)].surface) &&
               !gazetteers.is_honorific(book.tokens[static_cast<size_t>(i)].surface))
            ++i;
        int end = i - 1;
        if (end >= start) {
            MentionSpan m;
            m.token_start = start;
            m.token_end = end;
            m.surface = token_span_surface(book, start, end);
            m.source = MentionSource::GazetteerTagged;
            mentions.push_back(std::move(m));
        }
    }
    return mentions;
}

}  // namespace graphlit
