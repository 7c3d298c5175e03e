#include "graphlit/name_clustering.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "json.hpp"

namespace graphlit {

namespace {

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool is_subsequence(const std::vector<std::string>& small, const std::vector<std::string>& big) {
    size_t j = 0;
    for (size_t i = 0; i < big.size() && j < small.size(); ++i)
        if (big[i] == small[j]) ++j;
    return j == small.size();
}

std::string joined(const std::vector<std::string>& tokens) {
    std::string s;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) s += ' ';
        s += tokens[i];
    }
    return s;
}

}  // namespace

std::vector<NameVertex> build_name_vertices(const TokenizedBook& book,
                                            const std::vector<MentionSpan>& mentions,
                                            const Gazetteers& gazetteers) {
    std::map<std::string, NameVertex> by_name;
    std::map<std::string, std::map<std::string, int>> surface_counts;
    for (size_t i = 0; i < mentions.size(); ++i) {
        const MentionSpan& m = mentions[i];
        std::string norm = normalize_name(m.surface);
        if (norm.empty()) continue;
        NameVertex& v = by_name[norm];
        if (v.occurrences.empty()) v.normalized_name = norm;
        v.occurrences.push_back(static_cast<int>(i));
        surface_counts[norm][m.surface]++;
    }

    std::vector<NameVertex> vertices;
    vertices.reserve(by_name.size());
    for (auto& [norm, v] : by_name) {
        // Most frequent original surface, ties to the smallest.
        const auto& counts = surface_counts[norm];
        int best = -1;
        for (const auto& [surface, count] : counts) {
            if (count > best) {
                best = count;
                v.display_name = surface;
            }
        }
        std::vector<std::string> tokens = split_words(norm);
        if (!tokens.empty() && gazetteers.is_honorific(tokens.front())) {
            v.honorific = gazetteers.honorific_key(tokens.front());
            tokens.erase(tokens.begin());
        }
        v.name_tokens = tokens;
        if (tokens.size() >= 2) {
            v.first_name = tokens.front();
            v.surname = tokens.back();
        } else if (tokens.size() == 1) {
            // A lone token after an honorific reads as a surname ("Mr. Bennet");
            // a bare lone token reads as a given name ("Elizabeth").
            if (!v.honorific.empty())
                v.surname = tokens.front();
            else
                v.first_name = tokens.front();
        }
        v.gender = infer_gender(v, gazetteers, book, mentions);
        vertices.push_back(std::move(v));
    }
    return vertices;
}

Gender infer_gender(const NameVertex& vertex, const Gazetteers& gazetteers, const TokenizedBook& book,
                    const std::vector<MentionSpan>& mentions, int pronoun_window) {
    if (!vertex.honorific.empty()) {
        Gender g = gazetteers.honorific_gender(vertex.honorific);
        if (g != Gender::Unknown) return g;
    }
    std::string lookup = vertex.first_name.empty()
                             ? (vertex.name_tokens.size() == 1 ? vertex.name_tokens.front() : std::string())
                             : vertex.first_name;
    if (!lookup.empty()) {
        Gender g = gazetteers.name_gender(lookup);
        if (g != Gender::Unknown) return g;
    }
    int male = 0, female = 0;
    const int n = static_cast<int>(book.tokens.size());
    for (int occ : vertex.occurrences) {
        const MentionSpan& m = mentions[static_cast<size_t>(occ)];
        int lo = m.token_end + 1;
        int hi = std::min(n, lo + pronoun_window);
        for (int k = lo; k < hi; ++k) {
            const std::string& s = book.tokens[static_cast<size_t>(k)].surface;
            if (s == "his" || s == "himself")
                ++male;
            else if (s == "her" || s == "herself")
                ++female;
        }
    }
    if (male > female) return Gender::Male;
    if (female > male) return Gender::Female;
    return Gender::Unknown;
}

namespace {

bool rule_a_equal_stripped(const NameVertex& a, const NameVertex& b) {
    return !a.name_tokens.empty() && joined(a.name_tokens) == joined(b.name_tokens);
}

bool shares_name_key(const NameVertex& a, const NameVertex& b) {
    for (const std::string& t : a.name_tokens) {
        bool key_of_a = t == a.first_name || t == a.surname;
        bool key_of_b = t == b.first_name || t == b.surname;
        if ((key_of_a || key_of_b) &&
            std::find(b.name_tokens.begin(), b.name_tokens.end(), t) != b.name_tokens.end())
            return true;
    }
    return false;
}

bool rule_b_subsequence(const NameVertex& a, const NameVertex& b) {
    const NameVertex& small = a.name_tokens.size() <= b.name_tokens.size() ? a : b;
    const NameVertex& big = a.name_tokens.size() <= b.name_tokens.size() ? b : a;
    if (small.name_tokens.empty() || small.name_tokens.size() == big.name_tokens.size()) return false;
    return is_subsequence(small.name_tokens, big.name_tokens) && shares_name_key(a, b);
}

bool rule_c_hypocorism(const NameVertex& a, const NameVertex& b, const Gazetteers& gaz) {
    if (a.first_name.empty() || b.first_name.empty()) return false;
    if (!gaz.names_equivalent(a.first_name, b.first_name)) return false;
    if (!a.surname.empty() && !b.surname.empty() && a.surname != b.surname) return false;
    return true;
}

bool restriction_r1_gender(const NameVertex& a, const NameVertex& b) {
    return a.gender != Gender::Unknown && b.gender != Gender::Unknown && a.gender != b.gender;
}

bool restriction_r2_surname(const NameVertex& a, const NameVertex& b, const Gazetteers& gaz) {
    if (a.surname.empty() || b.surname.empty() || a.surname != b.surname) return false;
    if (a.first_name.empty() || b.first_name.empty()) return false;
    return !gaz.names_equivalent(a.first_name, b.first_name);
}

bool restriction_r3_honorific(const NameVertex& a, const NameVertex& b) {
    return !a.honorific.empty() && !b.honorific.empty() && a.honorific != b.honorific;
}

bool violates_restriction(const NameVertex& a, const NameVertex& b, const Gazetteers& gaz) {
    return restriction_r1_gender(a, b) || restriction_r2_surname(a, b, gaz) ||
           restriction_r3_honorific(a, b);
}

std::vector<std::vector<int>> adjacency(int n, const std::set<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (auto& [u, v] : edges) {
        adj[static_cast<size_t>(u)].push_back(v);
        adj[static_cast<size_t>(v)].push_back(u);
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    return adj;
}

// Lexicographically smallest shortest path from s to t, or empty when
// disconnected.
std::vector<int> smallest_shortest_path(int n, const std::set<std::pair<int, int>>& edges, int s, int t) {
    auto adj = adjacency(n, edges);
    std::vector<int> dist(static_cast<size_t>(n), -1);
    std::deque<int> queue{t};
    dist[static_cast<size_t>(t)] = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : adj[static_cast<size_t>(u)])
            if (dist[static_cast<size_t>(v)] < 0) {
                dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
                queue.push_back(v);
            }
    }
    if (dist[static_cast<size_t>(s)] < 0) return {};
    std::vector<int> path{s};
    int cur = s;
    while (cur != t) {
        for (int v : adj[static_cast<size_t>(cur)]) {
            if (dist[static_cast<size_t>(v)] == dist[static_cast<size_t>(cur)] - 1) {
                path.push_back(v);
                cur = v;
                break;
            }
        }
    }
    return path;
}

}  // namespace

bool inclusion_rule_links(const NameVertex& a, const NameVertex& b, const Gazetteers& gazetteers) {
    return rule_a_equal_stripped(a, b) || rule_b_subsequence(a, b) || rule_c_hypocorism(a, b, gazetteers);
}

NameGraph build_name_graph(std::vector<NameVertex> vertices, const Gazetteers& gazetteers) {
    NameGraph g;
    g.vertices = std::move(vertices);
    const int n = static_cast<int>(g.vertices.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (inclusion_rule_links(g.vertices[static_cast<size_t>(i)], g.vertices[static_cast<size_t>(j)], gazetteers))
                g.edges.insert({i, j});
    // Restriction pass: drop violating edges, remember every violating pair.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (violates_restriction(g.vertices[static_cast<size_t>(i)], g.vertices[static_cast<size_t>(j)], gazetteers)) {
                g.edges.erase({i, j});
                g.prohibited.emplace_back(i, j);
            }
    return g;
}

void prune_graph(NameGraph& graph, const Gazetteers& gazetteers) {
    const int n = static_cast<int>(graph.vertices.size());
    for (auto& [s, t] : graph.prohibited) {
        while (true) {
            std::vector<int> path = smallest_shortest_path(n, graph.edges, s, t);
            if (path.empty()) break;
            for (size_t k = 0; k + 1 < path.size(); ++k) {
                int u = path[k], v = path[k + 1];
                graph.edges.erase({std::min(u, v), std::max(u, v)});
            }
        }
    }

    // Ambiguous isolates: a degree-0 vertex attributable to >= 2 surviving
    // clusters is dropped (e.g. a bare surname shared by two characters).
    std::vector<int> degree(static_cast<size_t>(n), 0);
    for (auto& [u, v] : graph.edges) {
        degree[static_cast<size_t>(u)]++;
        degree[static_cast<size_t>(v)]++;
    }
    // Component labels over current edges.
    std::vector<int> comp(static_cast<size_t>(n), -1);
    auto adj = adjacency(n, graph.edges);
    int n_comp = 0;
    for (int i = 0; i < n; ++i) {
        if (comp[static_cast<size_t>(i)] >= 0) continue;
        std::deque<int> queue{i};
        comp[static_cast<size_t>(i)] = n_comp;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : adj[static_cast<size_t>(u)])
                if (comp[static_cast<size_t>(v)] < 0) {
                    comp[static_cast<size_t>(v)] = n_comp;
                    queue.push_back(v);
                }
        }
        ++n_comp;
    }
    std::vector<bool> removed(static_cast<size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        if (degree[static_cast<size_t>(i)] != 0) continue;
        // Only bare single-token names (isolated surnames like "Bennet") are
        // removal candidates; fuller name forms keep their own cluster.
        const NameVertex& cand = graph.vertices[static_cast<size_t>(i)];
        if (!cand.honorific.empty() || cand.name_tokens.size() != 1) continue;
        std::set<int> attributable;
        for (int j = 0; j < n; ++j) {
            if (j == i || comp[static_cast<size_t>(j)] == comp[static_cast<size_t>(i)]) continue;
            if (inclusion_rule_links(graph.vertices[static_cast<size_t>(i)], graph.vertices[static_cast<size_t>(j)], gazetteers))
                attributable.insert(comp[static_cast<size_t>(j)]);
        }
        if (attributable.size() >= 2) removed[static_cast<size_t>(i)] = true;
    }
    if (std::none_of(removed.begin(), removed.end(), [](bool b) { return b; })) return;

    // Compact the vertex set.
    NameGraph out;
    std::vector<int> remap(static_cast<size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (removed[static_cast<size_t>(i)]) continue;
        remap[static_cast<size_t>(i)] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(std::move(graph.vertices[static_cast<size_t>(i)]));
    }
    for (auto& [u, v] : graph.edges) {
        int nu = remap[static_cast<size_t>(u)], nv = remap[static_cast<size_t>(v)];
        if (nu >= 0 && nv >= 0) out.edges.insert({std::min(nu, nv), std::max(nu, nv)});
    }
    graph = std::move(out);
    graph.prohibited.clear();
}

std::vector<CharacterCluster> extract_clusters(const NameGraph& graph,
                                               const std::vector<MentionSpan>& mentions,
                                               int min_mentions) {
    const int n = static_cast<int>(graph.vertices.size());
    auto adj = adjacency(n, graph.edges);
    std::vector<int> comp(static_cast<size_t>(n), -1);
    std::vector<std::vector<int>> members;
    for (int i = 0; i < n; ++i) {
        if (comp[static_cast<size_t>(i)] >= 0) continue;
        int id = static_cast<int>(members.size());
        members.emplace_back();
        std::deque<int> queue{i};
        comp[static_cast<size_t>(i)] = id;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            members[static_cast<size_t>(id)].push_back(u);
            for (int v : adj[static_cast<size_t>(u)])
                if (comp[static_cast<size_t>(v)] < 0) {
                    comp[static_cast<size_t>(v)] = id;
                    queue.push_back(v);
                }
        }
    }

    std::vector<CharacterCluster> clusters;
    for (auto& group : members) {
        CharacterCluster c;
        int best = group.front();
        for (int v : group) {
            const NameVertex& cand = graph.vertices[static_cast<size_t>(v)];
            const NameVertex& cur = graph.vertices[static_cast<size_t>(best)];
            size_t cand_tokens = split_words(cand.normalized_name).size();
            size_t cur_tokens = split_words(cur.normalized_name).size();
            if (cand_tokens != cur_tokens) {
                if (cand_tokens > cur_tokens) best = v;
            } else if (cand.occurrences.size() != cur.occurrences.size()) {
                if (cand.occurrences.size() > cur.occurrences.size()) best = v;
            } else if (cand.normalized_name < cur.normalized_name) {
                best = v;
            }
        }
        c.canonical_name = graph.vertices[static_cast<size_t>(best)].display_name;
        int male = 0, female = 0;
        for (int v : group) {
            const NameVertex& vert = graph.vertices[static_cast<size_t>(v)];
            c.aliases.push_back(vert.display_name);
            for (int occ : vert.occurrences) c.mention_indices.push_back(occ);
            if (vert.gender == Gender::Male) ++male;
            if (vert.gender == Gender::Female) ++female;
        }
        std::sort(c.aliases.begin(), c.aliases.end());
        c.aliases.erase(std::unique(c.aliases.begin(), c.aliases.end()), c.aliases.end());
        std::sort(c.mention_indices.begin(), c.mention_indices.end());
        c.mention_count = static_cast<int>(c.mention_indices.size());
        c.gender = male > female ? Gender::Male : (female > male ? Gender::Female : Gender::Unknown);
        for (int occ : c.mention_indices) {
            const MentionSpan& m = mentions[static_cast<size_t>(occ)];
            c.occurrences.emplace_back(m.token_start, m.token_end);
        }
        if (c.mention_count >= min_mentions) clusters.push_back(std::move(c));
    }

    // Narrative order: earliest mention first, canonical name breaks ties.
    std::sort(clusters.begin(), clusters.end(), [](const CharacterCluster& a, const CharacterCluster& b) {
        int sa = a.occurrences.empty() ? 0 : a.occurrences.front().first;
        int sb = b.occurrences.empty() ? 0 : b.occurrences.front().first;
        if (sa != sb) return sa < sb;
        return a.canonical_name < b.canonical_name;
    });
    for (size_t i = 0; i < clusters.size(); ++i) clusters[i].character_id = static_cast<int>(i);
    return clusters;
}

std::vector<CharacterCluster> cluster_characters(const TokenizedBook& book,
                                                 const std::vector<MentionSpan>& mentions,
                                                 const Gazetteers& gazetteers, int min_mentions) {
    auto vertices = build_name_vertices(book, mentions, gazetteers);
    NameGraph graph = build_name_graph(std::move(vertices), gazetteers);
    prune_graph(graph, gazetteers);
    return extract_clusters(graph, mentions, min_mentions);
}

std::string clusters_to_jsonl(const std::vector<CharacterCluster>& clusters) {
    std::ostringstream out;
    for (const auto& c : clusters) {
        nlohmann::ordered_json j;
        j["character_id"] = c.character_id;
        j["canonical_name"] = c.canonical_name;
        j["aliases"] = c.aliases;
        j["mention_count"] = c.mention_count;
        j["gender"] = gender_str(c.gender);
        auto spans = nlohmann::ordered_json::array();
        for (auto& [s, e] : c.occurrences) spans.push_back({s, e});
        j["occurrences"] = std::move(spans);
        out << j.dump() << "\n";
    }
    return out.str();
}

}  // namespace graphlit
