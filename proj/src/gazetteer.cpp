#include "graphlit/gazetteer.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace graphlit {

namespace {

std::string ascii_lower(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

Gender parse_gender(const std::string& s, const std::string& path, int line_no) {
    if (s == "M") return Gender::Male;
    if (s == "F") return Gender::Female;
    if (s == "A") return Gender::Unknown;
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected M, F or A, got '" + s + "'");
}

void for_each_line(const std::string& path, const std::function<void(const std::string&, int)>& fn) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open gazetteer file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        fn(line, line_no);
    }
}

std::pair<std::string, std::string> split_tab(const std::string& line, const std::string& path, int line_no) {
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected a tab separator");
    return {line.substr(0, tab), line.substr(tab + 1)};
}

}  // namespace

std::string normalize_name(const std::string& s) {
    std::string out;
    bool in_space = true;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            if (!in_space && !out.empty()) out += ' ';
            in_space = true;
        } else {
            out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

Gazetteers Gazetteers::builtin() {
    Gazetteers g;
    const std::pair<const char*, Gender> honorifics[] = {
        {"mr", Gender::Male},     {"mister", Gender::Male},   {"master", Gender::Male},
        {"sir", Gender::Male},    {"lord", Gender::Male},     {"mrs", Gender::Female},
        {"ms", Gender::Female},   {"miss", Gender::Female},   {"missus", Gender::Female},
        {"lady", Gender::Female}, {"madam", Gender::Female},  {"madame", Gender::Female},
        {"mme", Gender::Female},  {"mlle", Gender::Female},   {"dr", Gender::Unknown},
        {"prof", Gender::Unknown}, {"professor", Gender::Unknown}, {"rev", Gender::Unknown},
        {"reverend", Gender::Unknown}, {"st", Gender::Unknown}, {"capt", Gender::Unknown},
        {"captain", Gender::Unknown}, {"col", Gender::Unknown}, {"colonel", Gender::Unknown},
        {"gen", Gender::Unknown}, {"general", Gender::Unknown}, {"lt", Gender::Unknown},
        {"lieutenant", Gender::Unknown}, {"sgt", Gender::Unknown}, {"sergeant", Gender::Unknown},
        {"major", Gender::Unknown}, {"don", Gender::Male}, {"dona", Gender::Female},
        {"senor", Gender::Male},  {"senora", Gender::Female}, {"fraulein", Gender::Female},
        {"frau", Gender::Female}, {"herr", Gender::Male},
    };
    for (auto& [name, gender] : honorifics) g.honorifics_[name] = gender;

    const std::pair<const char*, Gender> names[] = {
        {"john", Gender::Male},      {"james", Gender::Male},    {"william", Gender::Male},
        {"george", Gender::Male},    {"charles", Gender::Male},  {"thomas", Gender::Male},
        {"henry", Gender::Male},     {"edward", Gender::Male},   {"robert", Gender::Male},
        {"joseph", Gender::Male},    {"arthur", Gender::Male},   {"frederick", Gender::Male},
        {"richard", Gender::Male},   {"samuel", Gender::Male},   {"david", Gender::Male},
        {"daniel", Gender::Male},    {"peter", Gender::Male},    {"paul", Gender::Male},
        {"francis", Gender::Male},   {"walter", Gender::Male},   {"timothy", Gender::Male},
        {"tim", Gender::Male},       {"philip", Gender::Male},   {"hugh", Gender::Male},
        {"andrew", Gender::Male},    {"stephen", Gender::Male},  {"michael", Gender::Male},
        {"patrick", Gender::Male},   {"nicholas", Gender::Male}, {"anthony", Gender::Male},
        {"fitzwilliam", Gender::Male},
        {"mary", Gender::Female},    {"elizabeth", Gender::Female}, {"anne", Gender::Female},
        {"anna", Gender::Female},    {"jane", Gender::Female},   {"margaret", Gender::Female},
        {"catherine", Gender::Female}, {"katherine", Gender::Female}, {"emma", Gender::Female},
        {"alice", Gender::Female},   {"sarah", Gender::Female},  {"ellen", Gender::Female},
        {"helen", Gender::Female},   {"lucy", Gender::Female},   {"laura", Gender::Female},
        {"caroline", Gender::Female}, {"charlotte", Gender::Female}, {"harriet", Gender::Female},
        {"emily", Gender::Female},   {"julia", Gender::Female},  {"susan", Gender::Female},
        {"fanny", Gender::Female},   {"lydia", Gender::Female},  {"kitty", Gender::Female},
        {"eleanor", Gender::Female}, {"isabella", Gender::Female}, {"sophia", Gender::Female},
        {"agnes", Gender::Female},   {"clara", Gender::Female},  {"edith", Gender::Female},
        {"florence", Gender::Female}, {"grace", Gender::Female}, {"rose", Gender::Female},
        {"ruth", Gender::Female},    {"esther", Gender::Female}, {"martha", Gender::Female},
        {"rachel", Gender::Female},  {"rebecca", Gender::Female},
    };
    for (auto& [name, gender] : names) g.name_gender_[name] = gender;

    const std::pair<const char*, const char*> hypocorisms[] = {
        {"timothy", "tim"},      {"timothy", "timmy"},    {"elizabeth", "liz"},
        {"elizabeth", "lizzy"},  {"elizabeth", "eliza"},  {"elizabeth", "beth"},
        {"elizabeth", "betsy"},  {"elizabeth", "bess"},   {"elizabeth", "bessie"},
        {"william", "will"},     {"william", "bill"},     {"william", "billy"},
        {"robert", "rob"},       {"robert", "bob"},       {"robert", "bobby"},
        {"richard", "dick"},     {"richard", "rick"},     {"james", "jim"},
        {"james", "jimmy"},      {"john", "johnny"},      {"john", "jack"},
        {"margaret", "meg"},     {"margaret", "maggie"},  {"margaret", "peggy"},
        {"katherine", "kate"},   {"katherine", "katie"},  {"katherine", "kitty"},
        {"thomas", "tom"},       {"thomas", "tommy"},     {"edward", "ned"},
        {"edward", "ed"},        {"edward", "eddie"},     {"henry", "hal"},
        {"henry", "harry"},      {"samuel", "sam"},       {"daniel", "dan"},
        {"daniel", "danny"},     {"david", "dave"},       {"david", "davy"},
        {"michael", "mike"},     {"nicholas", "nick"},    {"anthony", "tony"},
        {"frederick", "fred"},   {"frederick", "freddy"}, {"francis", "frank"},
        {"andrew", "andy"},      {"benjamin", "ben"},     {"charles", "charlie"},
        {"joseph", "joe"},       {"joseph", "joey"},      {"lawrence", "larry"},
        {"matthew", "matt"},     {"patrick", "pat"},      {"peter", "pete"},
        {"philip", "phil"},      {"stephen", "steve"},    {"theodore", "ted"},
        {"walter", "walt"},      {"ann", "nan"},          {"ann", "nancy"},
        {"ann", "annie"},        {"caroline", "carrie"},  {"dorothy", "dolly"},
        {"emily", "emmy"},       {"frances", "fanny"},    {"florence", "flo"},
        {"harriet", "hattie"},   {"jane", "jenny"},       {"josephine", "jo"},
        {"charlotte", "lottie"}, {"mary", "molly"},       {"mary", "polly"},
        {"mary", "mamie"},       {"sarah", "sally"},      {"sophia", "sophy"},
        {"susan", "susie"},      {"susan", "sue"},        {"matilda", "tilly"},
        {"winifred", "winnie"},  {"helen", "nell"},       {"helen", "nellie"},
    };
    for (auto& [canonical, variant] : hypocorisms) g.link_names(canonical, variant);
    return g;
}

void Gazetteers::load_honorifics(const std::string& path) {
    for_each_line(path, [&](const std::string& line, int line_no) {
        auto [name, g] = split_tab(line, path, line_no);
        honorifics_[normalize_name(name)] = parse_gender(g, path, line_no);
    });
}

void Gazetteers::load_name_gender(const std::string& path) {
    for_each_line(path, [&](const std::string& line, int line_no) {
        auto [name, g] = split_tab(line, path, line_no);
        name_gender_[normalize_name(name)] = parse_gender(g, path, line_no);
    });
}

void Gazetteers::load_hypocorisms(const std::string& path) {
    for_each_line(path, [&](const std::string& line, int line_no) {
        auto [canonical, variant] = split_tab(line, path, line_no);
        link_names(normalize_name(canonical), normalize_name(variant));
    });
}

std::string Gazetteers::honorific_key(const std::string& token) const {
    std::string key = ascii_lower(token);
    if (!key.empty() && key.back() == '.') key.pop_back();
    return honorifics_.count(key) ? key : std::string();
}

bool Gazetteers::is_honorific(const std::string& token) const {
    return !honorific_key(token).empty();
}

Gender Gazetteers::honorific_gender(const std::string& token) const {
    std::string key = honorific_key(token);
    if (key.empty()) return Gender::Unknown;
    return honorifics_.at(key);
}

Gender Gazetteers::name_gender(const std::string& name) const {
    auto it = name_gender_.find(normalize_name(name));
    return it == name_gender_.end() ? Gender::Unknown : it->second;
}

std::string Gazetteers::find_group(const std::string& name) const {
    auto it = hypo_parent_.find(name);
    if (it == hypo_parent_.end()) return name;
    if (it->second == name) return name;
    std::string root = find_group(it->second);
    hypo_parent_[name] = root;  // path compression
    return root;
}

void Gazetteers::link_names(const std::string& a, const std::string& b) {
    if (!hypo_parent_.count(a)) hypo_parent_[a] = a;
    if (!hypo_parent_.count(b)) hypo_parent_[b] = b;
    std::string ra = find_group(a), rb = find_group(b);
    if (ra != rb) {
        // Smaller root wins for determinism.
        if (rb < ra) std::swap(ra, rb);
        hypo_parent_[rb] = ra;
    }
}

bool Gazetteers::names_equivalent(const std::string& a, const std::string& b) const {
    std::string na = normalize_name(a), nb = normalize_name(b);
    if (na == nb) return true;
    if (!hypo_parent_.count(na) || !hypo_parent_.count(nb)) return false;
    return find_group(na) == find_group(nb);
}

}  // namespace graphlit
