#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace kwrank {

using StopwordSet = std::unordered_set<std::string>;

namespace detail {

inline bool ascii_alnum(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline char ascii_lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : char(c);
}

inline std::string lowercase(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) out += ascii_lower(c);
    return out;
}

inline std::string_view trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && (unsigned char)s[b] <= ' ') ++b;
    while (e > b && (unsigned char)s[e - 1] <= ' ') --e;
    return s.substr(b, e - b);
}

}  // namespace detail

// Keyword normalization: lowercase, split on every non-alphanumeric byte,
// drop pieces shorter than two characters, drop stopwords. Order and
// duplicates are preserved; frequency counting needs the duplicates.
inline std::vector<std::string> tokenize(std::string_view raw, const StopwordSet& stopwords = {}) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2 && !stopwords.count(current)) tokens.push_back(current);
        current.clear();
    };
    for (unsigned char c : raw) {
        if (detail::ascii_alnum(c)) {
            current += detail::ascii_lower(c);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

// Single-keyword normalization used for query strings and rule terms: the
// input must reduce to exactly one alphanumeric piece (length >= 1, no
// stopword or length-two filtering).
inline std::optional<std::string> normalize_keyword(std::string_view raw) {
    std::string keyword;
    bool in_piece = false, seen_piece = false;
    for (unsigned char c : raw) {
        if (detail::ascii_alnum(c)) {
            if (!in_piece) {
                if (seen_piece) return std::nullopt;  // second piece
                in_piece = seen_piece = true;
            }
            keyword += detail::ascii_lower(c);
        } else {
            in_piece = false;
        }
    }
    if (keyword.empty()) return std::nullopt;
    return keyword;
}

// Strict UTF-8 validation (rejects overlongs, surrogates, > U+10FFFF).
inline bool valid_utf8(std::string_view bytes) {
    size_t i = 0, n = bytes.size();
    while (i < n) {
        unsigned char c = bytes[i];
        if (c < 0x80) {
            ++i;
            continue;
        }
        int len;
        unsigned cp;
        if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > n) return false;
        for (int k = 1; k < len; ++k) {
            unsigned char cc = bytes[i + k];
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (len == 2 && cp < 0x80) return false;
        if (len == 3 && cp < 0x800) return false;
        if (len == 4 && cp < 0x10000) return false;
        if (cp >= 0xD800 && cp <= 0xDFFF) return false;
        if (cp > 0x10FFFF) return false;
        i += len;
    }
    return true;
}

// One stopword per line; '#' lines are comments. Entries are lowercased.
inline StopwordSet parse_stopwords(std::string_view text) {
    StopwordSet words;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        words.insert(detail::lowercase(line));
    }
    return words;
}

// Default English stopword list shipped with the artifact; mirrored at
// data/stopwords.txt for editing (a test keeps the two in sync).
inline const StopwordSet& default_stopwords() {
    static const StopwordSet words = {
        "about", "above", "after", "again", "all", "also", "an", "and", "any", "are",
        "as", "at", "be", "because", "been", "before", "being", "below", "between",
        "both", "but", "by", "can", "did", "do", "does", "down", "during", "each",
        "few", "for", "from", "further", "had", "has", "have", "having", "he", "her",
        "here", "hers", "him", "his", "how", "if", "in", "into", "is", "it", "its",
        "just", "me", "more", "most", "my", "no", "nor", "not", "now", "of", "off",
        "on", "once", "only", "or", "other", "our", "out", "over", "own", "same",
        "she", "so", "some", "such", "than", "that", "the", "their", "them", "then",
        "there", "these", "they", "this", "those", "through", "to", "too", "under",
        "until", "up", "very", "was", "we", "were", "what", "when", "where", "which",
        "while", "who", "whom", "why", "will", "with", "you", "your",
    };
    return words;
}

}  // namespace kwrank
