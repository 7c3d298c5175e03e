#include "graphlit/dhcn.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace graphlit {

using nlohmann::ordered_json;

const char* variant_str(DhcnVariant v) {
    switch (v) {
        case DhcnVariant::Full: return "full";
        case DhcnVariant::NoCn: return "no_cn";
        case DhcnVariant::StaticCn: return "static_cn";
        case DhcnVariant::DcnOnly: return "dcn_only";
    }
    return "full";
}

DhcnVariant variant_from_str(const std::string& s) {
    if (s == "full") return DhcnVariant::Full;
    if (s == "no_cn") return DhcnVariant::NoCn;
    if (s == "static_cn") return DhcnVariant::StaticCn;
    if (s == "dcn_only") return DhcnVariant::DcnOnly;
    throw std::runtime_error("unknown DHCN variant: " + s);
}

int64_t Dhcn::total_cc_edges() const {
    int64_t n = 0;
    for (const auto& b : blocks) n += static_cast<int64_t>(b.cc_edges.size());
    return n;
}
int64_t Dhcn::total_cs_edges() const {
    int64_t n = 0;
    for (const auto& b : blocks) n += static_cast<int64_t>(b.cs_edges.size());
    return n;
}
int64_t Dhcn::total_character_nodes() const {
    int64_t n = 0;
    for (const auto& b : blocks) n += static_cast<int64_t>(b.character_nodes.size());
    return n;
}
int64_t Dhcn::total_segment_nodes() const {
    int64_t n = 0;
    for (const auto& b : blocks) n += static_cast<int64_t>(b.segment_nodes.size());
    return n;
}

bool dhcn_equal(const Dhcn& a, const Dhcn& b) {
    if (a.book_id != b.book_id || a.variant != b.variant || !(a.block_mode == b.block_mode) ||
        a.token_count != b.token_count || a.blocks != b.blocks ||
        a.characters.size() != b.characters.size())
        return false;
    for (size_t i = 0; i < a.characters.size(); ++i) {
        const auto& ca = a.characters[i];
        const auto& cb = b.characters[i];
        if (ca.character_id != cb.character_id || ca.canonical_name != cb.canonical_name ||
            ca.aliases != cb.aliases || ca.mention_count != cb.mention_count ||
            ca.gender != cb.gender || ca.occurrences != cb.occurrences)
            return false;
    }
    return true;
}

namespace {

struct Paragraph {
    int token_start;
    int token_end;  // inclusive
    int size() const { return token_end - token_start + 1; }
};

std::vector<Paragraph> paragraphs_of(const TokenizedBook& book) {
    std::vector<Paragraph> out;
    const int n = static_cast<int>(book.tokens.size());
    if (n == 0) return out;
    std::vector<int> starts{0};
    for (int b : book.paragraph_breaks)
        if (b > 0 && b < n) starts.push_back(b);
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    for (size_t i = 0; i < starts.size(); ++i) {
        int end = (i + 1 < starts.size() ? starts[i + 1] : n) - 1;
        out.push_back({starts[i], end});
    }
    return out;
}

// Segments for one block span: accumulate whole paragraphs to segment_tokens;
// a single paragraph longer than 2*segment_tokens is split at segment_tokens
// boundaries.
std::vector<std::pair<int, int>> segment_spans(const std::vector<Paragraph>& paragraphs,
                                               int segment_tokens) {
    std::vector<std::pair<int, int>> out;
    int open_start = -1;
    int open_tokens = 0;
    auto close_open = [&]() {
        if (open_start >= 0) {
            out.emplace_back(open_start, open_start + open_tokens - 1);
            open_start = -1;
            open_tokens = 0;
        }
    };
    for (const Paragraph& p : paragraphs) {
        if (p.size() > 2 * segment_tokens) {
            close_open();
            int s = p.token_start;
            while (s <= p.token_end) {
                int e = std::min(p.token_end, s + segment_tokens - 1);
                out.emplace_back(s, e);
                s = e + 1;
            }
            continue;
        }
        if (open_start < 0) open_start = p.token_start;
        open_tokens += p.size();
        if (open_tokens >= segment_tokens) close_open();
    }
    close_open();
    return out;
}

}  // namespace

std::vector<Hcn> partition(const TokenizedBook& book, const BlockMode& mode, int segment_tokens) {
    std::vector<Hcn> blocks;
    auto paragraphs = paragraphs_of(book);
    if (paragraphs.empty()) return blocks;

    // Group paragraphs into block spans.
    std::vector<std::vector<Paragraph>> grouped;
    if (mode.kind == BlockMode::Kind::FixedTokens) {
        std::vector<Paragraph> open;
        int open_tokens = 0;
        for (const Paragraph& p : paragraphs) {
            open.push_back(p);
            open_tokens += p.size();
            if (open_tokens >= mode.size) {
                grouped.push_back(std::move(open));
                open.clear();
                open_tokens = 0;
            }
        }
        if (!open.empty()) grouped.push_back(std::move(open));
    } else {
        std::vector<int> starts = book.chapter_breaks;
        if (starts.empty()) starts.push_back(0);
        if (starts.front() != 0) starts.insert(starts.begin(), 0);
        std::sort(starts.begin(), starts.end());
        starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
        size_t chapter = 0;
        grouped.emplace_back();
        for (const Paragraph& p : paragraphs) {
            while (chapter + 1 < starts.size() && p.token_start >= starts[chapter + 1]) {
                ++chapter;
                grouped.emplace_back();
            }
            grouped.back().push_back(p);
        }
        // Drop empty leading groups (possible when chapter 0 starts mid-book
        // but paragraphs exist before it -- kept by construction above).
        grouped.erase(std::remove_if(grouped.begin(), grouped.end(),
                                     [](const std::vector<Paragraph>& g) { return g.empty(); }),
                      grouped.end());
    }

    int block_index = 0;
    for (const auto& group : grouped) {
        Hcn block;
        block.block_index = block_index;
        block.token_start = group.front().token_start;
        block.token_end = group.back().token_end;
        int pos = 0;
        for (auto& [s, e] : segment_spans(group, segment_tokens)) {
            Segment seg;
            seg.block_index = block_index;
            seg.position = pos++;
            seg.token_start = s;
            seg.token_end = e;
            seg.text = token_span_surface(book, s, e);
            block.segment_nodes.push_back(std::move(seg));
        }
        blocks.push_back(std::move(block));
        ++block_index;
    }
    return blocks;
}

Dhcn extract_dhcn(const TokenizedBook& book, const std::vector<MentionSpan>& mentions,
                  std::vector<CharacterCluster> clusters, const ExtractOptions& options) {
    Dhcn dhcn;
    dhcn.book_id = book.book_id;
    dhcn.variant = DhcnVariant::Full;
    dhcn.block_mode = options.block_mode;
    dhcn.token_count = static_cast<int>(book.tokens.size());
    dhcn.blocks = partition(book, options.block_mode, options.segment_tokens);

    // Mention -> character id.
    std::vector<int> mention_char(mentions.size(), -1);
    for (const auto& c : clusters)
        for (int mi : c.mention_indices) mention_char[static_cast<size_t>(mi)] = c.character_id;

    // Per block: resolved mentions (start token, character) sorted by start.
    struct Anchor {
        int start;
        int character;
    };
    for (auto& block : dhcn.blocks) {
        std::vector<Anchor> anchors;
        for (size_t i = 0; i < mentions.size(); ++i) {
            if (mention_char[i] < 0) continue;
            int s = mentions[i].token_start;
            if (s >= block.token_start && s <= block.token_end)
                anchors.push_back({s, mention_char[i]});
        }
        std::sort(anchors.begin(), anchors.end(), [](const Anchor& a, const Anchor& b) {
            return a.start != b.start ? a.start < b.start : a.character < b.character;
        });

        std::map<int, bool> present;
        for (const Anchor& a : anchors) present[a.character] = true;
        for (auto& [c, _] : present) block.character_nodes.push_back(c);

        // Window co-occurrence over mention start tokens, strictly intra-block.
        std::map<std::pair<int, int>, int> cc;
        for (size_t i = 0; i < anchors.size(); ++i) {
            for (size_t j = i + 1; j < anchors.size(); ++j) {
                if (anchors[j].start - anchors[i].start > options.window) break;
                if (anchors[i].character == anchors[j].character) continue;
                int a = std::min(anchors[i].character, anchors[j].character);
                int b = std::max(anchors[i].character, anchors[j].character);
                cc[{a, b}]++;
            }
        }
        for (auto& [pair, count] : cc) block.cc_edges.push_back({pair.first, pair.second, count});

        // Character-segment edges by mention start containment.
        std::set<std::pair<int, int>> cs;
        for (const Anchor& a : anchors) {
            for (const Segment& seg : block.segment_nodes) {
                if (a.start >= seg.token_start && a.start <= seg.token_end) {
                    cs.insert({a.character, seg.position});
                    break;
                }
            }
        }
        for (auto& [c, pos] : cs) block.cs_edges.push_back({c, pos});
    }

    dhcn.characters = std::move(clusters);
    return dhcn;
}

Dhcn apply_variant(const Dhcn& full, DhcnVariant variant) {
    if (full.variant != DhcnVariant::Full)
        throw std::runtime_error("apply_variant expects a full-variant DHCN");
    Dhcn out = full;
    out.variant = variant;
    switch (variant) {
        case DhcnVariant::Full:
            break;
        case DhcnVariant::NoCn:
            for (auto& b : out.blocks) b.cc_edges.clear();
            break;
        case DhcnVariant::DcnOnly:
            for (auto& b : out.blocks) {
                b.segment_nodes.clear();
                b.cs_edges.clear();
            }
            break;
        case DhcnVariant::StaticCn: {
            Hcn merged;
            merged.block_index = 0;
            merged.token_start = full.blocks.empty() ? 0 : full.blocks.front().token_start;
            merged.token_end = full.blocks.empty() ? 0 : full.blocks.back().token_end;
            std::set<int> chars;
            std::map<std::pair<int, int>, int> cc;
            std::set<std::pair<int, int>> cs;
            int pos = 0;
            for (const auto& b : full.blocks) {
                for (int c : b.character_nodes) chars.insert(c);
                for (const auto& e : b.cc_edges) cc[{e.a, e.b}] += e.co_count;
                std::map<int, int> pos_map;
                for (const auto& seg : b.segment_nodes) {
                    Segment s = seg;
                    pos_map[seg.position] = pos;
                    s.block_index = 0;
                    s.position = pos++;
                    merged.segment_nodes.push_back(std::move(s));
                }
                for (const auto& e : b.cs_edges) cs.insert({e.character_id, pos_map.at(e.segment_pos)});
            }
            merged.character_nodes.assign(chars.begin(), chars.end());
            for (auto& [pair, count] : cc) merged.cc_edges.push_back({pair.first, pair.second, count});
            for (auto& [c, p] : cs) merged.cs_edges.push_back({c, p});
            out.blocks.clear();
            out.blocks.push_back(std::move(merged));
            break;
        }
    }
    return out;
}

std::vector<size_t> filter_corpus(const std::vector<Dhcn>& dhcns, const FilterLimits& limits,
                                  std::vector<RejectionRecord>* rejections) {
    std::vector<size_t> retained;
    for (size_t i = 0; i < dhcns.size(); ++i) {
        const Dhcn& d = dhcns[i];
        std::string rule;
        if (static_cast<int>(d.blocks.size()) > limits.max_blocks) {
            rule = "too_many_blocks";
        } else {
            for (const auto& b : d.blocks)
                if (static_cast<int>(b.segment_nodes.size()) > limits.max_segments_per_block) {
                    rule = "too_many_segments_per_block";
                    break;
                }
            if (rule.empty() && d.total_cc_edges() < limits.min_cc_edges) rule = "too_few_cc_edges";
            if (rule.empty() && d.total_character_nodes() == 0) rule = "no_character_nodes";
            if (rule.empty() && static_cast<int>(d.blocks.size()) < limits.min_blocks) rule = "too_few_blocks";
        }
        if (rule.empty()) {
            retained.push_back(i);
        } else if (rejections) {
            rejections->push_back({d.book_id, rule});
        }
    }
    return retained;
}

CorpusStats compute_stats(const std::vector<Dhcn>& dhcns) {
    if (dhcns.empty()) throw std::runtime_error("compute_stats on an empty corpus");
    CorpusStats s;
    const double n_books = static_cast<double>(dhcns.size());
    for (const Dhcn& d : dhcns) {
        double blocks = static_cast<double>(d.blocks.size());
        s.blocks_per_book += blocks;
        s.characters_per_book += static_cast<double>(d.characters.size());
        if (!d.characters.empty()) {
            double mentions = 0;
            for (const auto& c : d.characters) mentions += c.mention_count;
            s.mentions_per_character += mentions / static_cast<double>(d.characters.size());
        }
        double v_s = static_cast<double>(d.total_segment_nodes());
        double v_c = static_cast<double>(d.total_character_nodes());
        s.segment_nodes += v_s;
        s.character_nodes += v_c;
        if (blocks > 0) s.segments_per_block += v_s / blocks;
        s.cc_edges += static_cast<double>(d.total_cc_edges());
        s.cs_edges += static_cast<double>(d.total_cs_edges());

        // Node-level degree means within each book.
        double char_degree_sum = 0, seg_degree_sum = 0;
        for (const auto& b : d.blocks) {
            std::map<int, int> cdeg;
            for (int c : b.character_nodes) cdeg[c] = 0;
            std::map<int, int> sdeg;
            for (const auto& seg : b.segment_nodes) sdeg[seg.position] = 0;
            for (const auto& e : b.cc_edges) {
                cdeg[e.a]++;
                cdeg[e.b]++;
            }
            for (const auto& e : b.cs_edges) {
                cdeg[e.character_id]++;
                sdeg[e.segment_pos]++;
            }
            for (auto& [_, deg] : cdeg) char_degree_sum += deg;
            for (auto& [_, deg] : sdeg) seg_degree_sum += deg;
        }
        if (v_c > 0) s.character_degree += char_degree_sum / v_c;
        if (v_s > 0) s.segment_degree += seg_degree_sum / v_s;
    }
    s.blocks_per_book /= n_books;
    s.characters_per_book /= n_books;
    s.mentions_per_character /= n_books;
    s.segment_nodes /= n_books;
    s.character_nodes /= n_books;
    s.segments_per_block /= n_books;
    s.cc_edges /= n_books;
    s.cs_edges /= n_books;
    s.character_degree /= n_books;
    s.segment_degree /= n_books;
    return s;
}

std::string stats_to_csv(const CorpusStats& stats, const std::string& split_label) {
    std::ostringstream out;
    out << "Split,Block,Char,M_c,V^S,V^C,Seg/Block,E^C,E^S,Degree^C,Degree^S\n";
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f\n",
                  split_label.c_str(), stats.blocks_per_book, stats.characters_per_book,
                  stats.mentions_per_character, stats.segment_nodes, stats.character_nodes,
                  stats.segments_per_block, stats.cc_edges, stats.cs_edges, stats.character_degree,
                  stats.segment_degree);
    out << buf;
    return out.str();
}

namespace {

ordered_json cluster_to_json(const CharacterCluster& c) {
    ordered_json j;
    j["character_id"] = c.character_id;
    j["canonical_name"] = c.canonical_name;
    j["aliases"] = c.aliases;
    j["mention_count"] = c.mention_count;
    j["gender"] = gender_str(c.gender);
    auto spans = ordered_json::array();
    for (auto& [s, e] : c.occurrences) spans.push_back({s, e});
    j["occurrences"] = std::move(spans);
    return j;
}

CharacterCluster cluster_from_json(const ordered_json& j) {
    CharacterCluster c;
    c.character_id = j.at("character_id").get<int>();
    c.canonical_name = j.at("canonical_name").get<std::string>();
    c.aliases = j.at("aliases").get<std::vector<std::string>>();
    c.mention_count = j.at("mention_count").get<int>();
    std::string g = j.at("gender").get<std::string>();
    c.gender = g == "M" ? Gender::Male : (g == "F" ? Gender::Female : Gender::Unknown);
    for (const auto& span : j.at("occurrences"))
        c.occurrences.emplace_back(span.at(0).get<int>(), span.at(1).get<int>());
    return c;
}

}  // namespace

std::string dhcn_to_jsonl(const Dhcn& dhcn) {
    std::ostringstream out;
    ordered_json header;
    header["format"] = "dhcn";
    header["version"] = 1;
    header["book_id"] = dhcn.book_id;
    header["variant"] = variant_str(dhcn.variant);
    header["block_mode"] =
        ordered_json{{"kind", dhcn.block_mode.kind == BlockMode::Kind::Chapter ? "chapter" : "tokens"},
                     {"size", dhcn.block_mode.size}};
    header["token_count"] = dhcn.token_count;
    auto chars = ordered_json::array();
    for (const auto& c : dhcn.characters) chars.push_back(cluster_to_json(c));
    header["characters"] = std::move(chars);
    out << header.dump() << "\n";

    for (const auto& b : dhcn.blocks) {
        ordered_json j;
        j["block"] = b.block_index;
        j["token_span"] = {b.token_start, b.token_end};
        j["characters"] = b.character_nodes;
        auto segs = ordered_json::array();
        for (const auto& s : b.segment_nodes)
            segs.push_back(ordered_json{
                {"pos", s.position}, {"span", {s.token_start, s.token_end}}, {"text", s.text}});
        j["segments"] = std::move(segs);
        auto cc = ordered_json::array();
        for (const auto& e : b.cc_edges) cc.push_back({e.a, e.b, e.co_count});
        j["cc_edges"] = std::move(cc);
        auto cs = ordered_json::array();
        for (const auto& e : b.cs_edges) cs.push_back({e.character_id, e.segment_pos});
        j["cs_edges"] = std::move(cs);
        out << j.dump() << "\n";
    }
    return out.str();
}

void serialize_dhcn(const Dhcn& dhcn, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write DHCN file: " + path);
    out << dhcn_to_jsonl(dhcn);
}

Dhcn dhcn_from_jsonl(const std::string& content, const std::string& origin) {
    std::istringstream in(content);
    std::string line;
    int line_no = 0;
    Dhcn dhcn;
    bool have_header = false;
    auto fail = [&](const std::string& what) -> void {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const std::exception& e) {
            fail(std::string("malformed JSON (") + e.what() + ")");
        }
        if (!have_header) {
            if (!j.contains("format") || j["format"] != "dhcn") fail("missing or wrong format magic");
            if (!j.contains("version") || j["version"].get<int>() != 1)
                fail("unsupported version (reader supports version 1)");
            dhcn.book_id = j.at("book_id").get<std::string>();
            dhcn.variant = variant_from_str(j.at("variant").get<std::string>());
            const auto& bm = j.at("block_mode");
            dhcn.block_mode.kind = bm.at("kind").get<std::string>() == "chapter"
                                       ? BlockMode::Kind::Chapter
                                       : BlockMode::Kind::FixedTokens;
            dhcn.block_mode.size = bm.at("size").get<int>();
            dhcn.token_count = j.at("token_count").get<int>();
            for (const auto& c : j.at("characters")) dhcn.characters.push_back(cluster_from_json(c));
            have_header = true;
            continue;
        }
        Hcn b;
        try {
            b.block_index = j.at("block").get<int>();
            b.token_start = j.at("token_span").at(0).get<int>();
            b.token_end = j.at("token_span").at(1).get<int>();
            b.character_nodes = j.at("characters").get<std::vector<int>>();
            for (const auto& s : j.at("segments")) {
                Segment seg;
                seg.block_index = b.block_index;
                seg.position = s.at("pos").get<int>();
                seg.token_start = s.at("span").at(0).get<int>();
                seg.token_end = s.at("span").at(1).get<int>();
                seg.text = s.at("text").get<std::string>();
                b.segment_nodes.push_back(std::move(seg));
            }
            for (const auto& e : j.at("cc_edges"))
                b.cc_edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>()});
            for (const auto& e : j.at("cs_edges"))
                b.cs_edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
        } catch (const std::exception& e) {
            fail(std::string("malformed block record (") + e.what() + ")");
        }
        dhcn.blocks.push_back(std::move(b));
    }
    if (!have_header) {
        line_no = 1;
        fail("empty DHCN file");
    }
    return dhcn;
}

Dhcn deserialize_dhcn(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open DHCN file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return dhcn_from_jsonl(ss.str(), path);
}

}  // namespace graphlit
