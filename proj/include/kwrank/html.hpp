#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <kwrank/text.hpp>

namespace kwrank {

namespace detail {

inline void append_utf8(std::string& out, unsigned cp) {
    if (cp < 0x80) {
        out += char(cp);
    } else if (cp < 0x800) {
        out += char(0xC0 | (cp >> 6));
        out += char(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += char(0xE0 | (cp >> 12));
        out += char(0x80 | ((cp >> 6) & 0x3F));
        out += char(0x80 | (cp & 0x3F));
    } else {
        out += char(0xF0 | (cp >> 18));
        out += char(0x80 | ((cp >> 12) & 0x3F));
        out += char(0x80 | ((cp >> 6) & 0x3F));
        out += char(0x80 | (cp & 0x3F));
    }
}

// Case-insensitive search, ASCII only.
inline size_t find_ci(std::string_view haystack, std::string_view needle, size_t from) {
    if (needle.empty()) return from;
    if (haystack.size() < needle.size()) return std::string_view::npos;
    for (size_t i = from; i + needle.size() <= haystack.size(); ++i) {
        size_t k = 0;
        while (k < needle.size() && ascii_lower(haystack[i + k]) == ascii_lower(needle[k])) ++k;
        if (k == needle.size()) return i;
    }
    return std::string_view::npos;
}

}  // namespace detail

// Decodes the common named entities plus numeric references. Unknown or
// unterminated entities are left verbatim.
inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c != '&') {
            out += c;
            ++i;
            continue;
        }
        size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 32) {
            out += c;
            ++i;
            continue;
        }
        std::string_view name = s.substr(i + 1, semi - i - 1);
        bool decoded = true;
        if (name == "amp") {
            out += '&';
        } else if (name == "lt") {
            out += '<';
        } else if (name == "gt") {
            out += '>';
        } else if (name == "quot") {
            out += '"';
        } else if (name == "apos") {
            out += '\'';
        } else if (name == "nbsp") {
            out += ' ';
        } else if (!name.empty() && name[0] == '#') {
            unsigned cp = 0;
            bool ok = name.size() > 1;
            if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
                for (size_t k = 2; k < name.size() && ok; ++k) {
                    char h = name[k];
                    unsigned d;
                    if (h >= '0' && h <= '9') d = h - '0';
                    else if (h >= 'a' && h <= 'f') d = h - 'a' + 10;
                    else if (h >= 'A' && h <= 'F') d = h - 'A' + 10;
                    else { ok = false; break; }
                    cp = cp * 16 + d;
                    if (cp > 0x10FFFF) ok = false;
                }
            } else {
                for (size_t k = 1; k < name.size() && ok; ++k) {
                    if (name[k] < '0' || name[k] > '9') { ok = false; break; }
                    cp = cp * 10 + (name[k] - '0');
                    if (cp > 0x10FFFF) ok = false;
                }
            }
            if (ok && cp != 0 && !(cp >= 0xD800 && cp <= 0xDFFF)) {
                detail::append_utf8(out, cp);
            } else {
                decoded = false;
            }
        } else {
            decoded = false;
        }
        if (decoded) {
            i = semi + 1;
        } else {
            out += c;
            ++i;
        }
    }
    return out;
}

using HtmlAttrs = std::vector<std::pair<std::string, std::string>>;

inline const std::string* find_attr(const HtmlAttrs& attrs, std::string_view name) {
    for (const auto& [k, v] : attrs) {
        if (k == name) return &v;
    }
    return nullptr;
}

// Push parser for real-world HTML: never throws on malformed input, never
// builds a tree. Subclasses receive text chunks and start/end tag events in
// document order. script/style bodies arrive as a single raw text chunk;
// title/textarea bodies are entity-decoded (RCDATA).
class HtmlScanner {
public:
    virtual ~HtmlScanner() = default;

    void scan(std::string_view html) {
        size_t i = 0;
        const size_t n = html.size();
        while (i < n) {
            size_t lt = html.find('<', i);
            if (lt == std::string_view::npos) {
                emit_text(html.substr(i), true);
                break;
            }
            if (lt > i) emit_text(html.substr(i, lt - i), true);
            i = lt;
            if (i + 1 >= n) {
                emit_text(html.substr(i), true);
                break;
            }
            char next = html[i + 1];
            if (next == '!') {
                if (html.compare(i, 4, "<!--") == 0) {
                    size_t end = html.find("-->", i + 4);
                    i = end == std::string_view::npos ? n : end + 3;
                } else {
                    size_t end = html.find('>', i + 2);  // doctype, CDATA and friends
                    i = end == std::string_view::npos ? n : end + 1;
                }
            } else if (next == '?') {
                size_t end = html.find('>', i + 2);
                i = end == std::string_view::npos ? n : end + 1;
            } else if (next == '/') {
                i = scan_end_tag(html, i);
            } else if (detail::ascii_alnum(next)) {
                i = scan_start_tag(html, i);
            } else {
                emit_text(html.substr(i, 1), false);
                ++i;
            }
        }
    }

protected:
    virtual void on_text(const std::string& text) { (void)text; }
    virtual void on_start_tag(const std::string& name, const HtmlAttrs& attrs, bool self_closing) {
        (void)name;
        (void)attrs;
        (void)self_closing;
    }
    virtual void on_end_tag(const std::string& name) { (void)name; }

private:
    void emit_text(std::string_view chunk, bool decode) {
        if (chunk.empty()) return;
        on_text(decode ? decode_entities(chunk) : std::string(chunk));
    }

    static bool raw_text_element(const std::string& name) {
        return name == "script" || name == "style" || name == "title" || name == "textarea";
    }

    size_t scan_end_tag(std::string_view html, size_t i) {
        size_t p = i + 2;
        std::string name;
        while (p < html.size() && (detail::ascii_alnum(html[p]) || html[p] == '-')) {
            name += detail::ascii_lower(html[p]);
            ++p;
        }
        size_t gt = html.find('>', p);
        if (!name.empty()) on_end_tag(name);
        return gt == std::string_view::npos ? html.size() : gt + 1;
    }

    size_t scan_start_tag(std::string_view html, size_t i) {
        const size_t n = html.size();
        size_t p = i + 1;
        std::string name;
        while (p < n && (detail::ascii_alnum(html[p]) || html[p] == '-')) {
            name += detail::ascii_lower(html[p]);
            ++p;
        }
        HtmlAttrs attrs;
        bool self_closing = false;
        while (p < n && html[p] != '>') {
            if ((unsigned char)html[p] <= ' ') {
                ++p;
                continue;
            }
            if (html[p] == '/') {
                ++p;
                if (p < n && html[p] == '>') self_closing = true;
                continue;
            }
            std::string attr_name;
            while (p < n && (unsigned char)html[p] > ' ' && html[p] != '=' && html[p] != '>' && html[p] != '/') {
                attr_name += detail::ascii_lower(html[p]);
                ++p;
            }
            while (p < n && (unsigned char)html[p] <= ' ') ++p;
            std::string value;
            if (p < n && html[p] == '=') {
                ++p;
                while (p < n && (unsigned char)html[p] <= ' ') ++p;
                if (p < n && (html[p] == '"' || html[p] == '\'')) {
                    char quote = html[p++];
                    size_t end = html.find(quote, p);
                    if (end == std::string_view::npos) {
                        value = html.substr(p);
                        p = n;
                    } else {
                        value = html.substr(p, end - p);
                        p = end + 1;
                    }
                } else {
                    while (p < n && (unsigned char)html[p] > ' ' && html[p] != '>') {
                        value += html[p];
                        ++p;
                    }
                }
            }
            if (!attr_name.empty() && !find_attr(attrs, attr_name)) {
                attrs.emplace_back(attr_name, decode_entities(value));
            }
        }
        if (p < n) ++p;  // consume '>'
        if (name.empty()) return p;
        on_start_tag(name, attrs, self_closing);
        if (self_closing || !raw_text_element(name)) return p;

        // Raw-text content runs to the matching close tag, tags inside do
        // not count (a "<img>" inside a script string stays script text).
        std::string close = "</" + name;
        size_t end = detail::find_ci(html, close, p);
        size_t content_end = end == std::string_view::npos ? n : end;
        if (content_end > p) {
            bool rcdata = name == "title" || name == "textarea";
            emit_text(html.substr(p, content_end - p), rcdata);
        }
        if (end == std::string_view::npos) {
            on_end_tag(name);
            return n;
        }
        size_t gt = html.find('>', end);
        on_end_tag(name);
        return gt == std::string_view::npos ? n : gt + 1;
    }
};

}  // namespace kwrank
