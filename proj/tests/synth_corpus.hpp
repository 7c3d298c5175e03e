#pragma once
// Seeded synthetic book generator shared by tests: random filler prose with
// planted character mentions, plus a standoff mention list. Self-contained so
// oracle comparisons stay independent of the extraction pipeline.

#include <string>
#include <vector>

#include "graphlit/dhcn.hpp"
#include "graphlit/mentions.hpp"
#include "graphlit/name_clustering.hpp"
#include "graphlit/rng.hpp"
#include "graphlit/text.hpp"

namespace graphlit::testsupport {

struct SynthBook {
    RawBook raw;
    TokenizedBook tokens;
    std::vector<MentionSpan> mentions;           // sorted by start token
    std::vector<int> mention_character;          // character index per mention
    std::vector<std::string> character_names;    // single-token names
};

inline SynthBook make_synth_book(const std::string& book_id, uint64_t seed, int approx_tokens,
                                 int n_characters) {
    static const char* filler[] = {"the",  "old",   "road",  "wound", "past",  "quiet", "farms",
                                   "and",  "long",  "grey",  "walls", "while", "rain",  "kept",
                                   "time", "over",  "field", "stone", "apple", "cart",  "light",
                                   "dark", "river", "bank",  "wind",  "north", "south", "house"};
    static const char* names[] = {"Aldora", "Brantley", "Cressida", "Dorwin", "Elspeth", "Fenwick",
                                  "Gilliam", "Hesper",   "Isolde",   "Jorund", "Katriel", "Lysander"};
    Rng rng = Rng::derive(seed, book_id);
    SynthBook book;
    book.raw.book_id = book_id;
    for (int c = 0; c < n_characters; ++c) book.character_names.push_back(names[c % 12]);

    std::string text;
    std::vector<std::pair<size_t, int>> planted;  // (byte offset of name start, character)
    int tokens_emitted = 0;
    int sentence_len = 0;
    while (tokens_emitted < approx_tokens) {
        if (sentence_len > 6 && rng.uniform() < 0.22) {
            text += ".";
            sentence_len = 0;
            if (rng.uniform() < 0.3) {
                text += "\n\n";
            } else {
                text += " ";
            }
            ++tokens_emitted;
            continue;
        }
        if (!text.empty() && text.back() != ' ' && text.back() != '\n') text += " ";
        if (rng.uniform() < 0.14) {
            int c = static_cast<int>(rng.next_below(static_cast<uint64_t>(n_characters)));
            planted.emplace_back(text.size(), c);
            text += book.character_names[static_cast<size_t>(c)];
        } else {
            text += filler[rng.next_below(28)];
        }
        ++tokens_emitted;
        ++sentence_len;
    }
    text += ".";
    book.raw.text = std::move(text);
    book.tokens = detect_chapters(tokenize(book.raw));

    // Map byte offsets to token indices.
    std::map<int64_t, int> token_at_byte;
    for (size_t i = 0; i < book.tokens.tokens.size(); ++i)
        token_at_byte[book.tokens.tokens[i].byte_start] = static_cast<int>(i);
    for (auto& [byte, character] : planted) {
        auto it = token_at_byte.find(static_cast<int64_t>(byte));
        if (it == token_at_byte.end()) continue;
        MentionSpan m;
        m.token_start = it->second;
        m.token_end = it->second;
        m.surface = book.tokens.tokens[static_cast<size_t>(it->second)].surface;
        m.source = MentionSource::Ingested;
        book.mentions.push_back(m);
        book.mention_character.push_back(character);
    }
    return book;
}

// Clusters with one character per planted name, bypassing name clustering so
// graph-construction tests control the character identities exactly.
inline std::vector<CharacterCluster> synth_clusters(const SynthBook& book) {
    std::vector<CharacterCluster> clusters(book.character_names.size());
    for (size_t c = 0; c < book.character_names.size(); ++c) {
        clusters[c].character_id = static_cast<int>(c);
        clusters[c].canonical_name = book.character_names[c];
        clusters[c].aliases = {book.character_names[c]};
        clusters[c].gender = Gender::Unknown;
    }
    for (size_t i = 0; i < book.mentions.size(); ++i) {
        auto& c = clusters[static_cast<size_t>(book.mention_character[i])];
        c.mention_indices.push_back(static_cast<int>(i));
        c.occurrences.emplace_back(book.mentions[i].token_start, book.mentions[i].token_end);
        c.mention_count++;
    }
    // Characters with no mentions keep empty clusters; drop them the way the
    // pipeline would.
    std::vector<CharacterCluster> kept;
    for (auto& c : clusters)
        if (c.mention_count > 0) kept.push_back(std::move(c));
    for (size_t i = 0; i < kept.size(); ++i) kept[i].character_id = static_cast<int>(i);
    // Remap mention -> character ids after the drop.
    return kept;
}

// O(M^2) window scan over all mention pairs, blocked the same way the builder
// blocks text; the independent oracle for cc/cs edge construction.
struct OracleEdges {
    std::map<std::pair<int, int>, int> cc_by_block_pair;  // key: (block, -), value below
    std::map<int, std::map<std::pair<int, int>, int>> cc; // block -> (a,b) -> count
    std::map<int, std::set<std::pair<int, int>>> cs;      // block -> (character, segment pos)
};

inline OracleEdges brute_force_edges(const Dhcn& dhcn, const std::vector<MentionSpan>& mentions,
                                     const std::vector<CharacterCluster>& clusters, int window) {
    std::vector<int> mention_char(mentions.size(), -1);
    for (const auto& c : clusters)
        for (int mi : c.mention_indices) mention_char[static_cast<size_t>(mi)] = c.character_id;
    OracleEdges oracle;
    auto block_of = [&](int token) {
        for (const auto& b : dhcn.blocks)
            if (token >= b.token_start && token <= b.token_end) return b.block_index;
        return -1;
    };
    for (size_t i = 0; i < mentions.size(); ++i) {
        if (mention_char[i] < 0) continue;
        int bi = block_of(mentions[i].token_start);
        for (size_t j = 0; j < mentions.size(); ++j) {
            if (i >= j || mention_char[j] < 0) continue;
            if (block_of(mentions[j].token_start) != bi) continue;
            if (std::abs(mentions[i].token_start - mentions[j].token_start) > window) continue;
            if (mention_char[i] == mention_char[j]) continue;
            int a = std::min(mention_char[i], mention_char[j]);
            int b = std::max(mention_char[i], mention_char[j]);
            oracle.cc[bi][{a, b}]++;
        }
        if (bi >= 0) {
            for (const auto& b : dhcn.blocks) {
                if (b.block_index != bi) continue;
                for (const auto& seg : b.segment_nodes)
                    if (mentions[i].token_start >= seg.token_start &&
                        mentions[i].token_start <= seg.token_end)
                        oracle.cs[bi].insert({mention_char[i], seg.position});
            }
        }
    }
    return oracle;
}

inline bool edges_match_oracle(const Dhcn& dhcn, const OracleEdges& oracle) {
    for (const auto& b : dhcn.blocks) {
        std::map<std::pair<int, int>, int> got;
        for (const auto& e : b.cc_edges) got[{e.a, e.b}] = e.co_count;
        auto want_it = oracle.cc.find(b.block_index);
        std::map<std::pair<int, int>, int> want =
            want_it == oracle.cc.end() ? std::map<std::pair<int, int>, int>{} : want_it->second;
        if (got != want) return false;
        std::set<std::pair<int, int>> got_cs;
        for (const auto& e : b.cs_edges) got_cs.insert({e.character_id, e.segment_pos});
        auto want_cs_it = oracle.cs.find(b.block_index);
        std::set<std::pair<int, int>> want_cs =
            want_cs_it == oracle.cs.end() ? std::set<std::pair<int, int>>{} : want_cs_it->second;
        if (got_cs != want_cs) return false;
    }
    return true;
}

}  // namespace graphlit::testsupport
