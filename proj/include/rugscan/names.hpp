#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bytes.hpp"

namespace rugscan {

/// Lowercase ASCII letters and digits; runs of whitespace become a single
/// space; everything else (punctuation, emoji, other non-ASCII) is dropped.
inline std::string normalize_name(std::string_view raw)
{
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
            pending_space = !out.empty();
        } else if ((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
        }
    }
    return out;
}

enum class NameCategory { clone, impersonation, meme, defi };

inline const char* to_string(NameCategory c)
{
    switch (c) {
    case NameCategory::clone: return "clone";
    case NameCategory::impersonation: return "impersonation";
    case NameCategory::meme: return "meme";
    default: return "defi";
    }
}

struct lists_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct ReferenceLists
{
    /// normalized name or alias -> canonical token name
    std::map<std::string, std::string> verified_tokens;
    std::set<std::string> companies;
    /// second-level domains
    std::set<std::string> websites;
    std::set<std::string> meme_keywords;
    std::set<std::string> defi_keywords{"swap", "defi", "finance"};

    static ReferenceLists defaults()
    {
        ReferenceLists l;
        l.meme_keywords = {"doge", "inu", "shiba", "moon", "elon", "pepe", "floki"};
        return l;
    }

    /// "www.pornhub.com" -> "pornhub"
    static std::string second_level_domain(std::string_view host)
    {
        std::string h(host);
        for (const char* prefix : {"https://", "http://"})
            if (h.starts_with(prefix)) h.erase(0, std::char_traits<char>::length(prefix));
        if (auto slash = h.find('/'); slash != std::string::npos) h.resize(slash);
        const auto last = h.rfind('.');
        if (last == std::string::npos) return normalize_name(h);
        const auto prev = h.rfind('.', last - 1);
        return normalize_name(h.substr(prev == std::string::npos ? 0 : prev + 1, last - (prev == std::string::npos ? 0 : prev + 1)));
    }

    /// Adds one list row. kind is token | company | website | meme | defi;
    /// alias_of names the canonical token for an alias row.
    void add(std::string_view term, std::string_view kind, std::string_view alias_of = {})
    {
        if (kind == "website") {
            auto d = second_level_domain(term);
            if (!d.empty()) websites.insert(std::move(d));
            return;
        }
        auto t = normalize_name(term);
        if (t.empty()) return;
        if (kind == "token") verified_tokens[t] = alias_of.empty() ? t : normalize_name(alias_of);
        else if (kind == "company") companies.insert(t);
        else if (kind == "meme") meme_keywords.insert(t);
        else if (kind == "defi") defi_keywords.insert(t);
        else throw lists_error("unknown list kind '" + std::string(kind) + "'");
    }
};

namespace names_detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

} // namespace names_detail

/// Reads one list file: CSV rows "term,kind,alias_of" with an optional header.
inline void load_list_file(const std::filesystem::path& path, ReferenceLists& lists)
{
    std::ifstream in(path);
    if (!in) throw lists_error("cannot open list " + path.string());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line[0] == '#') continue;
        auto cols = names_detail::split_csv_line(line);
        if (n == 1 && cols[0] == "term") continue;
        if (cols.size() < 2) throw lists_error(path.string() + ":" + std::to_string(n) + ": expected term,kind[,alias_of]");
        try {
            lists.add(cols[0], cols[1], cols.size() > 2 ? cols[2] : std::string{});
        } catch (const lists_error& e) {
            throw lists_error(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
}

/// Loads every *.csv in `dir` (sorted by file name). When no defi rows are
/// present the default defi keywords stay in place.
inline ReferenceLists load_reference_lists(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir)) throw lists_error("list directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    ReferenceLists lists;
    lists.defi_keywords.clear();
    for (const auto& f : files) load_list_file(f, lists);
    if (lists.defi_keywords.empty()) lists.defi_keywords = ReferenceLists{}.defi_keywords;
    return lists;
}

struct NameVerdict
{
    Address token;
    std::string name;
    std::string normalized;
    std::set<NameCategory> categories;
    /// "<category>:<term>"
    std::vector<std::string> matched_terms;

    bool covered() const noexcept { return !categories.empty(); }
};

namespace names_detail {

/// Multi-word terms must align with word boundaries; single words match as substrings.
inline bool term_matches(const std::string& normalized, const std::string& term)
{
    if (term.empty()) return false;
    if (term.find(' ') == std::string::npos) return normalized.find(term) != std::string::npos;
    const std::string hay = " " + normalized + " ";
    return hay.find(" " + term + " ") != std::string::npos;
}

} // namespace names_detail

inline NameVerdict classify(const Address& token, std::string_view name, const ReferenceLists& lists)
{
    NameVerdict v;
    v.token = token;
    v.name = std::string(name);
    v.normalized = normalize_name(name);
    if (v.normalized.empty()) return v;
    if (auto it = lists.verified_tokens.find(v.normalized); it != lists.verified_tokens.end()) {
        v.categories.insert(NameCategory::clone);
        v.matched_terms.push_back("clone:" + it->second);
    }
    auto scan = [&](const std::set<std::string>& terms, NameCategory c) {
        for (const auto& t : terms)
            if (names_detail::term_matches(v.normalized, t)) {
                v.categories.insert(c);
                v.matched_terms.push_back(std::string(to_string(c)) + ":" + t);
            }
    };
    scan(lists.companies, NameCategory::impersonation);
    scan(lists.websites, NameCategory::impersonation);
    scan(lists.meme_keywords, NameCategory::meme);
    scan(lists.defi_keywords, NameCategory::defi);
    return v;
}

inline NameVerdict classify(std::string_view name, const ReferenceLists& lists) { return classify(Address{}, name, lists); }

struct NameCount
{
    std::string name;
    std::size_t count = 0;
};

struct NameFrequency
{
    /// descending by count, then name
    std::vector<NameCount> table;
    std::size_t total = 0;

    double unique_ratio() const { return total ? static_cast<double>(table.size()) / static_cast<double>(total) : 0.0; }
};

/// Counts raw names; the unique ratio is distinct names over tokens.
inline NameFrequency name_frequency(std::span<const NameVerdict> verdicts)
{
    std::map<std::string, std::size_t> counts;
    for (const auto& v : verdicts) ++counts[v.name];
    NameFrequency f;
    f.total = verdicts.size();
    for (auto& [n, c] : counts) f.table.push_back({n, c});
    std::stable_sort(f.table.begin(), f.table.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
    return f;
}

struct CategoryCounts
{
    std::map<NameCategory, std::size_t> per_category;
    std::size_t covered = 0;
    std::size_t total = 0;

    double coverage() const { return total ? static_cast<double>(covered) / static_cast<double>(total) : 0.0; }
};

inline CategoryCounts category_counts(std::span<const NameVerdict> verdicts)
{
    CategoryCounts c;
    for (auto cat : {NameCategory::clone, NameCategory::impersonation, NameCategory::meme, NameCategory::defi})
        c.per_category[cat] = 0;
    c.total = verdicts.size();
    for (const auto& v : verdicts) {
        if (v.covered()) ++c.covered;
        for (auto cat : v.categories) ++c.per_category[cat];
    }
    return c;
}

} // namespace rugscan
