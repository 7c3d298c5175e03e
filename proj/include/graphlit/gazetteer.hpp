#pragma once
// Gazetteers backing name clustering: honorifics with gender, a name-gender
// list, and hypocorisms (name variations) grouped by union-find. Small
// built-in defaults keep the pipeline self-contained; files extend or replace
// them.
//
// File formats, one entry per line, '#' comments allowed:
//   honorifics:  "honorific<TAB>M|F|A"        (A = no gender signal)
//   name-gender: "name<TAB>M|F|A"             (A = ambiguous, ignored)
//   hypocorisms: "canonical<TAB>variant"

#include <map>
#include <string>
#include <vector>

namespace graphlit {

enum class Gender { Male, Female, Unknown };

inline const char* gender_str(Gender g) {
    switch (g) {
        case Gender::Male: return "M";
        case Gender::Female: return "F";
        default: return "U";
    }
}

class Gazetteers {
public:
    // Built-in honorifics, a small demo name-gender list and common English
    // hypocorisms.
    static Gazetteers builtin();

    void load_honorifics(const std::string& path);
    void load_name_gender(const std::string& path);
    void load_hypocorisms(const std::string& path);

    // Token is an honorific ("Mr.", "mrs", "Lady", ...). Lookup is
    // case-insensitive with a trailing period stripped.
    bool is_honorific(const std::string& token) const;
    // Normalized honorific key ("mr"), empty when not an honorific.
    std::string honorific_key(const std::string& token) const;
    Gender honorific_gender(const std::string& token) const;

    // Gender of a first name; Unknown when absent or ambiguous.
    Gender name_gender(const std::string& name) const;

    // True when two first names are the same hypocorism group (or equal).
    bool names_equivalent(const std::string& a, const std::string& b) const;

private:
    std::string find_group(const std::string& name) const;
    void link_names(const std::string& a, const std::string& b);

    std::map<std::string, Gender> honorifics_;
    std::map<std::string, Gender> name_gender_;
    mutable std::map<std::string, std::string> hypo_parent_;
};

// Lowercases ASCII and collapses runs of whitespace to single spaces.
std::string normalize_name(const std::string& s);

}  // namespace graphlit
