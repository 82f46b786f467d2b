#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <kwrank/errors.hpp>
#include <kwrank/ingest.hpp>
#include <kwrank/rational.hpp>

namespace kwrank {

struct FrequencyTable {
    std::map<std::string, long long> counts;  // zero-count keywords are absent

    std::size_t total_keywords() const { return counts.size(); }
    bool empty() const { return counts.empty(); }
};

struct CandidateEntry {
    std::string keyword;
    long long count = 0;

    bool operator==(const CandidateEntry&) const = default;
};

// Candidates sorted by count descending, then keyword ascending.
struct CandidateSet {
    std::vector<CandidateEntry> members;
    Rational threshold_fraction;

    bool contains(const std::string& keyword) const {
        for (const auto& m : members) {
            if (m.keyword == keyword) return true;
        }
        return false;
    }
};

struct TieGroup {
    long long count = 0;
    std::vector<std::string> keywords;  // sorted ascending, always >= 2 entries

    bool operator==(const TieGroup&) const = default;
};

inline FrequencyTable count_frequencies(std::span<const Token> tokens,
                                        const std::set<TokenSource>& enabled_sources) {
    FrequencyTable table;
    for (const auto& token : tokens) {
        if (enabled_sources.count(token.source)) ++table.counts[token.text];
    }
    return table;
}

// Top-fraction selection: keep the round(fraction * distinct keywords)
// most frequent keywords (at least one), extending past the cut while the
// boundary count ties so equal counts never depend on ordering luck.
// Rounding is half-up in exact integer arithmetic.
inline CandidateSet select_candidates(const FrequencyTable& table, const Rational& threshold_fraction) {
    if (threshold_fraction.num() <= 0 || threshold_fraction > Rational(1, 1))
        throw std::invalid_argument("threshold fraction must be in (0, 1]");
    if (table.empty()) throw EmptyTableError("cannot select candidates from an empty frequency table");

    std::vector<CandidateEntry> ranked;
    ranked.reserve(table.counts.size());
    for (const auto& [keyword, count] : table.counts) ranked.push_back({keyword, count});
    std::sort(ranked.begin(), ranked.end(), [](const CandidateEntry& a, const CandidateEntry& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.keyword < b.keyword;
    });

    const auto v = (long long)ranked.size();
    __int128 numerator = (__int128)2 * threshold_fraction.num() * v + threshold_fraction.den();
    long long k = (long long)(numerator / (2 * (__int128)threshold_fraction.den()));
    if (k < 1) k = 1;
    if (k > v) k = v;
    long long cut_count = ranked[k - 1].count;
    while (k < v && ranked[k].count == cut_count) ++k;

    CandidateSet result;
    result.threshold_fraction = threshold_fraction;
    result.members.assign(ranked.begin(), ranked.begin() + k);
    return result;
}

// One group per count shared by two or more candidates, largest count first.
inline std::vector<TieGroup> detect_ties(const CandidateSet& candidates) {
    std::vector<TieGroup> groups;
    size_t i = 0;
    const auto& members = candidates.members;
    while (i < members.size()) {
        size_t j = i;
        while (j < members.size() && members[j].count == members[i].count) ++j;
        if (j - i >= 2) {
            TieGroup group;
            group.count = members[i].count;
            for (size_t k = i; k < j; ++k) group.keywords.push_back(members[k].keyword);
            std::sort(group.keywords.begin(), group.keywords.end());
            groups.push_back(std::move(group));
        }
        i = j;
    }
    return groups;
}

}  // namespace kwrank
