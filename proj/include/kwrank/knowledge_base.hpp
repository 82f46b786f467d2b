#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <kwrank/errors.hpp>
#include <kwrank/rational.hpp>
#include <kwrank/text.hpp>

namespace kwrank {

// One directed correlation rule: antecedent -> consequent. The id is opaque
// and preserved from the file; comment (mined support/confidence) is carried
// for the file writer only and takes no part in identity.
struct Rule {
    long long id = 0;
    std::string antecedent;
    std::string consequent;
    std::string comment;

    friend bool operator==(const Rule& a, const Rule& b) {
        return a.id == b.id && a.antecedent == b.antecedent && a.consequent == b.consequent;
    }
};

struct CycleReport {
    std::vector<std::string> sequence;  // [w, ..., w]
};

// Immutable directed word-correlation graph plus its vocabulary. n_total is
// the vocabulary size and feeds the uniform transition weight 1/n_total.
class KnowledgeBase {
public:
    KnowledgeBase() = default;

    // An empty vocabulary means "derive from rule endpoints". Duplicate
    // (antecedent, consequent) pairs collapse to the first occurrence with a
    // warning; self-loops and unnormalized keywords are format errors.
    KnowledgeBase(std::vector<Rule> rules, std::set<std::string> vocabulary = {},
                  std::vector<std::string>* warnings = nullptr) {
        std::set<std::pair<std::string, std::string>> seen;
        for (auto& rule : rules) {
            validate_keyword(rule.antecedent);
            validate_keyword(rule.consequent);
            if (rule.antecedent == rule.consequent)
                throw FormatError("self-loop rule rejected: " + rule.antecedent + " -> " + rule.consequent);
            if (!seen.insert({rule.antecedent, rule.consequent}).second) {
                if (warnings)
                    warnings->push_back("duplicate rule ignored: " + rule.antecedent + " -> " + rule.consequent);
                continue;
            }
            rules_.push_back(std::move(rule));
        }
        if (vocabulary.empty()) {
            for (const auto& rule : rules_) {
                vocabulary_.insert(rule.antecedent);
                vocabulary_.insert(rule.consequent);
            }
        } else {
            for (auto word : vocabulary) {
                validate_keyword(word);
                vocabulary_.insert(std::move(word));
            }
            for (const auto& rule : rules_) {
                for (const auto* endpoint : {&rule.antecedent, &rule.consequent}) {
                    if (!vocabulary_.count(*endpoint))
                        throw VocabularyError("declared vocabulary is missing rule endpoint: " + *endpoint);
                }
            }
        }
        for (const auto& rule : rules_) backward_[rule.consequent].push_back(rule.antecedent);
        for (auto& [word, preds] : backward_) std::sort(preds.begin(), preds.end());
    }

    const std::vector<Rule>& rules() const { return rules_; }
    const std::set<std::string>& vocabulary() const { return vocabulary_; }
    std::size_t n_total() const { return vocabulary_.size(); }
    bool contains(const std::string& word) const { return vocabulary_.count(word) != 0; }
    bool has_rule(const std::string& antecedent, const std::string& consequent) const {
        auto it = backward_.find(consequent);
        return it != backward_.end() &&
               std::binary_search(it->second.begin(), it->second.end(), antecedent);
    }

    // All a with a rule a -> word, sorted. Empty for words nothing targets.
    const std::vector<std::string>& backward_words(const std::string& word) const {
        require_known(word);
        auto it = backward_.find(word);
        return it == backward_.end() ? empty_ : it->second;
    }

    void require_known(const std::string& word) const {
        if (!contains(word)) throw UnknownKeywordError({word});
    }

    // Digest over the semantic content (edges + vocabulary, ids excluded).
    std::string fingerprint() const {
        unsigned long long h = 1469598103934665603ull;  // FNV-1a 64
        auto mix = [&h](std::string_view s) {
            for (unsigned char c : s) {
                h ^= c;
                h *= 1099511628211ull;
            }
            h ^= 0x1F;
            h *= 1099511628211ull;
        };
        std::vector<std::pair<std::string, std::string>> edges;
        for (const auto& rule : rules_) edges.emplace_back(rule.antecedent, rule.consequent);
        std::sort(edges.begin(), edges.end());
        for (const auto& [a, b] : edges) {
            mix(a);
            mix(b);
        }
        mix("|");
        for (const auto& w : vocabulary_) mix(w);
        static const char* hex = "0123456789abcdef";
        std::string out(16, '0');
        for (int i = 15; i >= 0; --i) {
            out[i] = hex[h & 0xF];
            h >>= 4;
        }
        return out;
    }

    // Set equality on rules and vocabulary.
    friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
        if (a.vocabulary_ != b.vocabulary_) return false;
        auto key = [](const Rule& r) { return std::tie(r.antecedent, r.consequent, r.id); };
        auto sorted = [&key](std::vector<Rule> rules) {
            std::sort(rules.begin(), rules.end(),
                      [&key](const Rule& x, const Rule& y) { return key(x) < key(y); });
            return rules;
        };
        return sorted(a.rules_) == sorted(b.rules_);
    }

private:
    static void validate_keyword(std::string& word) {
        word = detail::lowercase(detail::trim(word));
        if (word.empty()) throw FormatError("empty keyword in rule");
        for (unsigned char c : word) {
            if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')))
                throw FormatError("keyword contains non-alphanumeric characters: " + word);
        }
    }

    std::vector<Rule> rules_;
    std::set<std::string> vocabulary_;
    std::map<std::string, std::vector<std::string>> backward_;
    std::vector<std::string> empty_;
};

namespace detail {

// Tab-split with per-field space trimming; trailing empty fields (left by a
// stripped inline comment) are dropped.
inline std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> fields;
    size_t pos = 0;
    while (pos <= line.size()) {
        size_t tab = line.find('\t', pos);
        std::string_view field = line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos);
        fields.emplace_back(trim(field));
        if (tab == std::string_view::npos) break;
        pos = tab + 1;
    }
    while (!fields.empty() && fields.back().empty()) fields.pop_back();
    return fields;
}

}  // namespace detail

// --- file format ------------------------------------------------------
//
//   ID<TAB>TermsX<TAB>TermsY
//   3<TAB>water<TAB>mountain
//   ...
//   [vocabulary]          (optional; one keyword per line)
//
// '#' starts a comment anywhere; blank lines are skipped.

inline KnowledgeBase load_kb(std::string_view text, std::vector<std::string>* warnings = nullptr) {
    std::vector<Rule> rules;
    std::set<std::string> vocabulary;
    bool header_seen = false;
    bool in_vocabulary = false;
    size_t pos = 0;
    size_t line_no = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (detail::trim(line).empty()) continue;

        if (!header_seen) {
            std::vector<std::string> fields = detail::split_tabs(line);
            if (fields.size() != 3 || detail::lowercase(fields[0]) != "id" ||
                detail::lowercase(fields[1]) != "termsx" || detail::lowercase(fields[2]) != "termsy") {
                throw FormatError("bad header on line " + std::to_string(line_no) +
                                  ": expected ID<TAB>TermsX<TAB>TermsY");
            }
            header_seen = true;
            continue;
        }
        if (detail::trim(line) == "[vocabulary]") {
            in_vocabulary = true;
            continue;
        }
        if (in_vocabulary) {
            vocabulary.insert(detail::lowercase(detail::trim(line)));
            continue;
        }
        std::vector<std::string> fields = detail::split_tabs(line);
        if (fields.size() < 3)
            throw FormatError("missing column on line " + std::to_string(line_no));
        if (fields.size() > 3)
            throw FormatError("too many columns on line " + std::to_string(line_no));
        Rule rule;
        try {
            size_t consumed = 0;
            rule.id = std::stoll(fields[0], &consumed);
            if (consumed != fields[0].size()) throw std::invalid_argument(fields[0]);
        } catch (const std::exception&) {
            throw FormatError("non-integer rule id on line " + std::to_string(line_no) + ": " + fields[0]);
        }
        rule.antecedent = fields[1];
        rule.consequent = fields[2];
        rules.push_back(std::move(rule));
    }
    if (!header_seen) throw FormatError("bad header: knowledge base file is empty");
    return KnowledgeBase(std::move(rules), std::move(vocabulary), warnings);
}

inline std::string save_kb(const KnowledgeBase& kb) {
    std::string out = "ID\tTermsX\tTermsY\n";
    std::set<std::string> endpoints;
    for (const auto& rule : kb.rules()) {
        out += std::to_string(rule.id);
        out += '\t';
        out += rule.antecedent;
        out += '\t';
        out += rule.consequent;
        if (!rule.comment.empty()) {
            out += "\t# ";
            out += rule.comment;
        }
        out += '\n';
        endpoints.insert(rule.antecedent);
        endpoints.insert(rule.consequent);
    }
    if (kb.vocabulary() != endpoints) {
        out += "[vocabulary]\n";
        for (const auto& word : kb.vocabulary()) {
            out += word;
            out += '\n';
        }
    }
    return out;
}

namespace detail {

enum class DfsColor { White, Grey, Black };

// Iterative DFS over backward edges; returns one cycle if any node of the
// given start set can reach a cycle backwards.
inline std::optional<CycleReport> backward_cycle_search(const KnowledgeBase& kb,
                                                        const std::vector<std::string>& starts) {
    std::map<std::string, DfsColor> color;
    std::vector<std::string> path;
    // frame: (word, next-predecessor index), path mirrors the grey chain
    for (const auto& start : starts) {
        if (color.count(start)) continue;
        std::vector<std::pair<std::string, size_t>> stack{{start, 0}};
        while (!stack.empty()) {
            auto& [word, next] = stack.back();
            if (next == 0) {
                auto it = color.find(word);
                if (it != color.end() && it->second == DfsColor::Black) {
                    stack.pop_back();
                    continue;
                }
                color[word] = DfsColor::Grey;
                path.push_back(word);
            }
            const auto& preds = kb.backward_words(word);
            if (next < preds.size()) {
                const std::string& pred = preds[next];
                ++next;
                auto it = color.find(pred);
                if (it == color.end()) {
                    stack.push_back({pred, 0});
                } else if (it->second == DfsColor::Grey) {
                    CycleReport report;
                    auto at = std::find(path.begin(), path.end(), pred);
                    report.sequence.assign(at, path.end());
                    report.sequence.push_back(pred);
                    return report;
                }
            } else {
                color[word] = DfsColor::Black;
                path.pop_back();
                stack.pop_back();
            }
        }
    }
    return std::nullopt;
}

}  // namespace detail

// ok (nullopt) when no directed cycle is reachable backwards from target.
inline std::optional<CycleReport> validate_acyclic(const KnowledgeBase& kb, const std::string& target) {
    kb.require_known(target);
    return detail::backward_cycle_search(kb, {target});
}

// Whole-graph check used before a pipeline run.
inline std::optional<CycleReport> find_any_cycle(const KnowledgeBase& kb) {
    std::vector<std::string> all(kb.vocabulary().begin(), kb.vocabulary().end());
    return detail::backward_cycle_search(kb, all);
}

using Transaction = std::set<std::string>;

// One transaction per line, keywords separated by whitespace, lowercased on
// the way in. Blank lines and '#' lines are skipped; duplicates within a
// line collapse to one occurrence.
inline std::vector<Transaction> parse_transactions(std::string_view text) {
    std::vector<Transaction> transactions;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        std::string line(detail::trim(raw));
        if (line.empty() || line[0] == '#') continue;
        Transaction transaction;
        size_t start = 0;
        while (start < line.size()) {
            while (start < line.size() && (std::isspace)((unsigned char)line[start])) ++start;
            size_t end = start;
            while (end < line.size() && !(std::isspace)((unsigned char)line[end])) ++end;
            if (end > start) transaction.insert(detail::lowercase(line.substr(start, end - start)));
            start = end;
        }
        if (!transaction.empty()) transactions.push_back(std::move(transaction));
    }
    return transactions;
}

// Minimal pairwise association miner: emit x -> y when the pair clears both
// the support and the confidence threshold. Exact rational comparisons, ids
// assigned in (antecedent, consequent) order from 1.
inline KnowledgeBase mine_rules(const std::vector<Transaction>& transactions,
                                const Rational& min_support, const Rational& min_confidence) {
    if (transactions.empty()) throw EmptyInputError("no transactions to mine");
    for (const auto& threshold : {min_support, min_confidence}) {
        if (threshold.num() <= 0 || threshold > Rational(1, 1))
            throw std::invalid_argument("mining thresholds must be in (0, 1]");
    }
    std::map<std::string, long long> item_count;
    std::map<std::pair<std::string, std::string>, long long> pair_count;
    for (const auto& transaction : transactions) {
        for (auto it = transaction.begin(); it != transaction.end(); ++it) {
            ++item_count[*it];
            for (auto jt = std::next(it); jt != transaction.end(); ++jt)
                ++pair_count[{*it, *jt}];  // unordered pair, set order gives it < jt
        }
    }
    const auto total = (long long)transactions.size();
    // holds iff a/b >= threshold, exactly
    auto clears = [](long long a, long long b, const Rational& threshold) {
        return (__int128)a * threshold.den() >= (__int128)threshold.num() * b;
    };
    std::vector<Rule> rules;
    for (const auto& [item_pair, together] : pair_count) {
        if (!clears(together, total, min_support)) continue;
        for (const auto& [x, y] : {item_pair, std::make_pair(item_pair.second, item_pair.first)}) {
            if (!clears(together, item_count[x], min_confidence)) continue;
            Rule rule;
            rule.antecedent = x;
            rule.consequent = y;
            rule.comment = "support=" + std::to_string(together) + "/" + std::to_string(total) +
                           " confidence=" + std::to_string(together) + "/" + std::to_string(item_count[x]);
            rules.push_back(std::move(rule));
        }
    }
    std::sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
        return std::tie(a.antecedent, a.consequent) < std::tie(b.antecedent, b.consequent);
    });
    for (size_t i = 0; i < rules.size(); ++i) rules[i].id = (long long)(i + 1);
    return KnowledgeBase(std::move(rules));
}

}  // namespace kwrank
