#pragma once
// Dynamic Heterogeneous Character Networks: per-block graphs over character
// and segment nodes, with character-character co-occurrence edges inside a
// token window and character-segment mention edges. Includes structural
// variants, corpus filters, summary statistics and JSON Lines serialization.

#include <map>
#include <string>
#include <vector>

#include "graphlit/mentions.hpp"
#include "graphlit/name_clustering.hpp"
#include "graphlit/text.hpp"

namespace graphlit {

enum class DhcnVariant { Full, NoCn, StaticCn, DcnOnly };

const char* variant_str(DhcnVariant v);
DhcnVariant variant_from_str(const std::string& s);

struct BlockMode {
    enum class Kind { FixedTokens, Chapter };
    Kind kind = Kind::FixedTokens;
    int size = 1500;  // token target, FixedTokens only

    bool operator==(const BlockMode&) const = default;
};

struct Segment {
    int block_index = 0;
    int position = 0;              // 0..n-1 within the block, narrative order
    int token_start = 0;
    int token_end = 0;             // inclusive
    std::string text;

    bool operator==(const Segment&) const = default;
};

struct CcEdge {
    int a = 0;  // character ids, a < b
    int b = 0;
    int co_count = 0;

    bool operator==(const CcEdge&) const = default;
};

struct CsEdge {
    int character_id = 0;
    int segment_pos = 0;  // position within the same block

    bool operator==(const CsEdge&) const = default;
};

struct Hcn {
    int block_index = 0;
    int token_start = 0;
    int token_end = 0;
    std::vector<int> character_nodes;   // sorted character ids
    std::vector<Segment> segment_nodes; // ordered by position
    std::vector<CcEdge> cc_edges;       // sorted by (a, b)
    std::vector<CsEdge> cs_edges;       // sorted by (character_id, segment_pos)

    bool operator==(const Hcn&) const = default;
};

struct Dhcn {
    std::string book_id;
    DhcnVariant variant = DhcnVariant::Full;
    BlockMode block_mode;
    int token_count = 0;
    std::vector<Hcn> blocks;
    std::vector<CharacterCluster> characters;

    int64_t total_cc_edges() const;
    int64_t total_cs_edges() const;
    int64_t total_character_nodes() const;
    int64_t total_segment_nodes() const;
};

// Serialized-field equality (character mention_indices are build-time only).
bool dhcn_equal(const Dhcn& a, const Dhcn& b);

struct ExtractOptions {
    BlockMode block_mode;
    int segment_tokens = 100;
    int window = 20;
};

// Paragraph-aligned blocks and segments. FixedTokens blocks accumulate whole
// paragraphs until the target is reached; segments accumulate paragraphs to
// segment_tokens, hard-splitting any single paragraph longer than twice that.
std::vector<Hcn> partition(const TokenizedBook& book, const BlockMode& mode, int segment_tokens);

// Full-variant DHCN for one book. Mentions are resolved to character ids via
// the clusters' mention indices; unresolved mentions carry no node.
Dhcn extract_dhcn(const TokenizedBook& book, const std::vector<MentionSpan>& mentions,
                  std::vector<CharacterCluster> clusters, const ExtractOptions& options);

// Structural variants of Fig-3 style: NoCn drops character-character edges,
// DcnOnly drops segment nodes, StaticCn collapses all blocks into one.
Dhcn apply_variant(const Dhcn& full, DhcnVariant variant);

struct RejectionRecord {
    std::string book_id;
    std::string rule;
};

struct FilterLimits {
    int max_blocks = 1500;
    int max_segments_per_block = 1000;
    int min_cc_edges = 5;
    int min_blocks = 5;

    static FilterLimits for_mode(BlockMode::Kind kind) {
        FilterLimits lim;
        if (kind == BlockMode::Kind::Chapter) {
            lim.max_blocks = 60;
            lim.max_segments_per_block = 150;
        }
        return lim;
    }
};

// Returns indices of retained books; rejected books log the first violated
// rule, checked in order: too_many_blocks, too_many_segments_per_block,
// too_few_cc_edges, no_character_nodes, too_few_blocks.
std::vector<size_t> filter_corpus(const std::vector<Dhcn>& dhcns, const FilterLimits& limits,
                                  std::vector<RejectionRecord>* rejections);

struct CorpusStats {
    double blocks_per_book = 0;
    double characters_per_book = 0;
    double mentions_per_character = 0;
    double segment_nodes = 0;
    double character_nodes = 0;
    double segments_per_block = 0;
    double cc_edges = 0;
    double cs_edges = 0;
    double character_degree = 0;
    double segment_degree = 0;
};

// Arithmetic means over books; degrees averaged over nodes then over books.
// Throws on an empty corpus.
CorpusStats compute_stats(const std::vector<Dhcn>& dhcns);

// CSV with the summary-table column names.
std::string stats_to_csv(const CorpusStats& stats, const std::string& split_label);

// JSON Lines round trip. serialize writes a header line then one line per
// block; deserialize validates format and version and reports the offending
// line on malformed input.
void serialize_dhcn(const Dhcn& dhcn, const std::string& path);
std::string dhcn_to_jsonl(const Dhcn& dhcn);
Dhcn deserialize_dhcn(const std::string& path);
Dhcn dhcn_from_jsonl(const std::string& content, const std::string& origin);

}  // namespace graphlit
