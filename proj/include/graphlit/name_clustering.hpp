#pragma once
// Character name clustering: mention-name graph with inclusion heuristics
// (honorific stripping, token subsequence, hypocorisms), gender-aware
// restriction rules, prohibited-pair path pruning and ambiguous-isolate
// removal; connected components become character clusters.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "graphlit/gazetteer.hpp"
#include "graphlit/mentions.hpp"
#include "graphlit/text.hpp"

namespace graphlit {

struct NameVertex {
    std::string normalized_name;           // lowercased, whitespace-collapsed
    std::string display_name;              // most frequent original surface
    std::vector<int> occurrences;          // indices into the book's mention list
    Gender gender = Gender::Unknown;
    std::string honorific;                 // normalized key, empty when absent
    std::string first_name;                // empty when not derivable
    std::string surname;                   // empty when not derivable
    std::vector<std::string> name_tokens;  // normalized tokens after honorific strip
};

struct NameGraph {
    std::vector<NameVertex> vertices;
    std::set<std::pair<int, int>> edges;            // undirected, first < second
    std::vector<std::pair<int, int>> prohibited;    // restriction-violating pairs
};

struct CharacterCluster {
    int character_id = 0;
    std::string canonical_name;
    std::vector<std::string> aliases;  // includes canonical_name, sorted
    int mention_count = 0;
    Gender gender = Gender::Unknown;
    std::vector<int> mention_indices;               // into the book's mention list
    std::vector<std::pair<int, int>> occurrences;   // token spans (start, end)
};

// One vertex per unique normalized mention surface, with honorific/name parts
// derived. Occurrence order follows the mention list.
std::vector<NameVertex> build_name_vertices(const TokenizedBook& book,
                                            const std::vector<MentionSpan>& mentions,
                                            const Gazetteers& gazetteers);

// Priority: honorific gender, then unambiguous gazetteer first name, then a
// majority vote over gendered pronouns within `pronoun_window` tokens after
// each occurrence.
Gender infer_gender(const NameVertex& vertex, const Gazetteers& gazetteers, const TokenizedBook& book,
                    const std::vector<MentionSpan>& mentions, int pronoun_window = 30);

// Inclusion rules (a)-(c) add edges; restriction rules r1-r3 delete edges and
// record prohibited pairs.
NameGraph build_name_graph(std::vector<NameVertex> vertices, const Gazetteers& gazetteers);

// For each prohibited pair still connected, deletes every edge on the
// lexicographically smallest shortest path until disconnected; then removes
// isolated vertices attributable to two or more surviving clusters.
void prune_graph(NameGraph& graph, const Gazetteers& gazetteers);

// Connected components -> clusters; canonical name = most tokens, then higher
// occurrence count, then lexicographic; clusters under min_mentions dropped.
// character_ids follow earliest mention order.
std::vector<CharacterCluster> extract_clusters(const NameGraph& graph,
                                               const std::vector<MentionSpan>& mentions,
                                               int min_mentions);

// Full pipeline for one book.
std::vector<CharacterCluster> cluster_characters(const TokenizedBook& book,
                                                 const std::vector<MentionSpan>& mentions,
                                                 const Gazetteers& gazetteers, int min_mentions);

// True when any inclusion rule links the two vertices (before restrictions).
bool inclusion_rule_links(const NameVertex& a, const NameVertex& b, const Gazetteers& gazetteers);

// JSON Lines cluster dump, one line per cluster.
std::string clusters_to_jsonl(const std::vector<CharacterCluster>& clusters);

}  // namespace graphlit
