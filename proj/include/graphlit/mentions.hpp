#pragma once
// Character mention spans: ingested from standoff JSON Lines files or, for
// self-contained runs, produced by a capitalization-based fallback tagger.

#include <string>
#include <vector>

#include "graphlit/gazetteer.hpp"
#include "graphlit/text.hpp"

namespace graphlit {

enum class MentionSource { Ingested, GazetteerTagged };

struct MentionSpan {
    int token_start = 0;
    int token_end = 0;  // inclusive
    std::string surface;
    MentionSource source = MentionSource::Ingested;
};

// Reads standoff mentions for this book (lines with other book_ids are
// skipped). Surfaces are rebuilt from token spans so they always match the
// tokenization. Malformed lines and out-of-range indices report the line
// number.
std::vector<MentionSpan> ingest_mentions(const TokenizedBook& book, const std::string& standoff_path);

// Tags maximal runs of capitalized tokens, optionally led by an honorific.
// All-caps tokens and paragraph-initial runs without an honorific are skipped
// to avoid ordinary sentence capitalization.
std::vector<MentionSpan> fallback_tag_mentions(const TokenizedBook& book, const Gazetteers& gazetteers);

}  // namespace graphlit
