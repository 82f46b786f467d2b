#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <kwrank/errors.hpp>
#include <kwrank/frequency.hpp>
#include <kwrank/knowledge_base.hpp>
#include <kwrank/rational.hpp>

namespace kwrank {

struct RankScore {
    std::string keyword;
    Rational score;                    // exact; equals contributing_paths / n_total
    long long contributing_paths = 0;  // directed paths of length >= 1 ending here

    bool operator==(const RankScore&) const = default;
};

struct ImportanceReport {
    std::map<std::string, RankScore> scores;
    std::string kb_fingerprint;

    Rational score_or_zero(const std::string& keyword) const {
        auto it = scores.find(keyword);
        return it == scores.end() ? Rational() : it->second.score;
    }
};

// Uniform transition weight: 1/n_total when the rule a -> b exists, else 0.
inline Rational transition_weight(const KnowledgeBase& kb, const std::string& a, const std::string& b) {
    kb.require_known(a);
    kb.require_known(b);
    if (!kb.has_rule(a, b)) return Rational();
    return Rational(1, (long long)kb.n_total());
}

namespace detail {

// Correlation rank over the ancestor cone of each requested word:
//   R(w) = sum over backward words a of ( 1/n_total + R(a) ),  R = 0 at sources.
// Memoized, iterative, and only defined on acyclic cones (checked by caller).
class RankComputer {
public:
    explicit RankComputer(const KnowledgeBase& kb) : kb_(kb) {}

    const Rational& score(const std::string& word) {
        auto ready = memo_.find(word);
        if (ready != memo_.end()) return ready->second;
        const Rational edge_weight(1, (long long)kb_.n_total());
        std::vector<std::pair<std::string, bool>> stack{{word, false}};
        while (!stack.empty()) {
            auto [current, expanded] = stack.back();
            stack.pop_back();
            if (memo_.count(current)) continue;
            const auto& preds = kb_.backward_words(current);
            if (expanded) {
                Rational total;
                for (const auto& pred : preds) total += edge_weight + memo_.at(pred);
                memo_.emplace(std::move(current), total);
            } else {
                stack.emplace_back(current, true);
                for (const auto& pred : preds) {
                    if (!memo_.count(pred)) stack.emplace_back(pred, false);
                }
            }
        }
        return memo_.at(word);
    }

private:
    const KnowledgeBase& kb_;
    std::map<std::string, Rational> memo_;
};

inline void require_acyclic(const KnowledgeBase& kb, const std::string& word) {
    if (auto cycle = validate_acyclic(kb, word)) throw CycleError(cycle->sequence);
}

inline long long paths_from_score(const Rational& score, long long n_total) {
    // score = paths / n_total with score reduced, so den divides n_total
    return score.num() * (n_total / score.den());
}

}  // namespace detail

// Rank of one keyword. Throws UnknownKeywordError for words outside the
// vocabulary and CycleError when the ancestor cone is cyclic.
inline RankScore rank(const KnowledgeBase& kb, const std::string& word) {
    kb.require_known(word);
    detail::require_acyclic(kb, word);
    detail::RankComputer computer(kb);
    Rational score = computer.score(word);
    return {word, score, detail::paths_from_score(score, (long long)kb.n_total())};
}

// Ranks a whole set with one shared memo table.
inline ImportanceReport rank_all(const KnowledgeBase& kb, const std::set<std::string>& words) {
    std::vector<std::string> missing;
    for (const auto& word : words) {
        if (!kb.contains(word)) missing.push_back(word);
    }
    if (!missing.empty()) throw UnknownKeywordError(std::move(missing));

    ImportanceReport report;
    report.kb_fingerprint = kb.fingerprint();
    detail::RankComputer computer(kb);
    for (const auto& word : words) {
        detail::require_acyclic(kb, word);
        Rational score = computer.score(word);
        report.scores.emplace(word,
                              RankScore{word, score, detail::paths_from_score(score, (long long)kb.n_total())});
    }
    return report;
}

// Verification oracle: exhaustively enumerates every directed path of
// length >= 1 ending at the word, no memoization, no shared state with the
// rank recursion. On an acyclic cone rank(w) == oracle_path_count(w)/n_total.
inline long long oracle_path_count(const KnowledgeBase& kb, const std::string& word) {
    kb.require_known(word);
    detail::require_acyclic(kb, word);
    struct Enumerator {
        const KnowledgeBase& kb;
        long long count_into(const std::string& w) const {
            long long total = 0;
            for (const auto& pred : kb.backward_words(w)) total += 1 + count_into(pred);
            return total;
        }
    };
    return Enumerator{kb}.count_into(word);
}

// Orders a same-frequency group by rank, best first; residual ties fall back
// to keyword order. Keywords outside the vocabulary simply rank zero, since
// document keywords routinely exceed knowledge-base coverage.
inline std::vector<std::string> resolve_tie(const KnowledgeBase& kb, const TieGroup& group) {
    std::set<std::string> known;
    for (const auto& keyword : group.keywords) {
        if (kb.contains(keyword)) known.insert(keyword);
    }
    ImportanceReport report = rank_all(kb, known);
    std::vector<std::string> order = group.keywords;
    std::sort(order.begin(), order.end(), [&report](const std::string& a, const std::string& b) {
        Rational ra = report.score_or_zero(a);
        Rational rb = report.score_or_zero(b);
        if (ra != rb) return ra > rb;
        return a < b;
    });
    return order;
}

// TSV rendering: keyword, decimal score, exact fraction, path count; best
// score first, keyword order inside equal scores.
inline std::string report_to_tsv(const ImportanceReport& report) {
    std::vector<const RankScore*> rows;
    rows.reserve(report.scores.size());
    for (const auto& [_, score] : report.scores) rows.push_back(&score);
    std::sort(rows.begin(), rows.end(), [](const RankScore* a, const RankScore* b) {
        if (a->score != b->score) return a->score > b->score;
        return a->keyword < b->keyword;
    });
    std::string out;
    for (const RankScore* row : rows) {
        out += row->keyword;
        out += '\t';
        out += row->score.to_decimal();
        out += '\t';
        out += row->score.to_fraction();
        out += '\t';
        out += std::to_string(row->contributing_paths);
        out += '\n';
    }
    return out;
}

}  // namespace kwrank
