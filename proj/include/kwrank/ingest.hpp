#pragma once

#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <kwrank/errors.hpp>
#include <kwrank/html.hpp>
#include <kwrank/text.hpp>

namespace kwrank {

// Where a token was found on the page. Counting can be restricted to a
// subset of sources through configuration.
enum class TokenSource {
    AltText,
    PageTitle,
    MetaKeywords,
    MetaDescription,
    Heading,
    Body,
};

inline constexpr TokenSource kAllTokenSources[] = {
    TokenSource::AltText,     TokenSource::PageTitle, TokenSource::MetaKeywords,
    TokenSource::MetaDescription, TokenSource::Heading, TokenSource::Body,
};

inline std::string_view to_string(TokenSource s) {
    switch (s) {
        case TokenSource::AltText: return "alt";
        case TokenSource::PageTitle: return "title";
        case TokenSource::MetaKeywords: return "meta-keywords";
        case TokenSource::MetaDescription: return "meta-description";
        case TokenSource::Heading: return "heading";
        case TokenSource::Body: return "body";
    }
    return "?";
}

inline std::optional<TokenSource> parse_token_source(std::string_view name) {
    for (TokenSource s : kAllTokenSources) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

inline std::set<TokenSource> all_token_sources() {
    return {std::begin(kAllTokenSources), std::end(kAllTokenSources)};
}

struct Token {
    std::string text;
    TokenSource source;

    bool operator==(const Token&) const = default;
};

struct ImageRef {
    std::string image_id;  // resolved src
    std::string alt_text;  // verbatim; duplicate srcs concatenate their alts
    std::string owner_doc;

    bool operator==(const ImageRef&) const = default;
};

struct Document {
    std::string doc_id;
    std::string title;
    std::vector<ImageRef> images;
    std::vector<Token> tokens;
};

// Lexical reference resolution for img srcs: enough for http(s) URLs and
// local paths, anything unresolvable stays verbatim.
namespace detail {

inline bool has_scheme(std::string_view s) {
    if (s.empty() || !((s[0] >= 'a' && s[0] <= 'z') || (s[0] >= 'A' && s[0] <= 'Z'))) return false;
    for (size_t i = 1; i < s.size(); ++i) {
        char c = s[i];
        if (c == ':') return true;
        if (!ascii_alnum(c) && c != '+' && c != '-' && c != '.') return false;
    }
    return false;
}

inline std::string normalize_path(std::string_view path, bool keep_leading_dotdot) {
    bool absolute = !path.empty() && path.front() == '/';
    std::vector<std::string> segments;
    size_t pos = 0;
    while (pos <= path.size()) {
        size_t slash = path.find('/', pos);
        std::string_view seg = path.substr(pos, slash == std::string_view::npos ? std::string_view::npos : slash - pos);
        pos = slash == std::string_view::npos ? path.size() + 1 : slash + 1;
        if (seg.empty() || seg == ".") continue;
        if (seg == "..") {
            if (!segments.empty() && segments.back() != "..") {
                segments.pop_back();
            } else if (!absolute && keep_leading_dotdot) {
                segments.emplace_back("..");
            }
            continue;
        }
        segments.emplace_back(seg);
    }
    std::string out = absolute ? "/" : "";
    for (size_t i = 0; i < segments.size(); ++i) {
        if (i) out += '/';
        out += segments[i];
    }
    return out;
}

}  // namespace detail

inline std::string resolve_reference(const std::string& base, std::string_view ref_in) {
    std::string_view ref = detail::trim(ref_in);
    if (ref.empty()) return std::string(ref);
    if (detail::has_scheme(ref)) return std::string(ref);

    bool base_is_url = base.compare(0, 7, "http://") == 0 || base.compare(0, 8, "https://") == 0;
    if (ref.substr(0, 2) == "//") {
        if (base_is_url) {
            size_t colon = base.find(':');
            return base.substr(0, colon + 1) + std::string(ref);
        }
        return std::string(ref);
    }

    // split off query/fragment, normalization applies to the path only
    size_t cut = ref.find_first_of("?#");
    std::string_view path = ref.substr(0, cut == std::string_view::npos ? ref.size() : cut);
    std::string tail = cut == std::string_view::npos ? "" : std::string(ref.substr(cut));

    if (base_is_url) {
        size_t scheme_end = base.find("//") + 2;
        size_t path_start = base.find('/', scheme_end);
        std::string origin = path_start == std::string::npos ? base : base.substr(0, path_start);
        std::string base_path = path_start == std::string::npos ? "/" : base.substr(path_start);
        if (size_t q = base_path.find_first_of("?#"); q != std::string::npos) base_path.resize(q);
        std::string joined;
        if (!path.empty() && path.front() == '/') {
            joined = std::string(path);
        } else {
            size_t dir_end = base_path.rfind('/');
            joined = base_path.substr(0, dir_end + 1) + std::string(path);
        }
        std::string normalized = detail::normalize_path(joined, false);
        if (normalized.empty() || normalized.front() != '/') normalized.insert(0, "/");
        return origin + normalized + tail;
    }

    // local path base
    if (!path.empty() && path.front() == '/') {
        return detail::normalize_path(path, false) + tail;
    }
    size_t dir_end = base.rfind('/');
    std::string joined = dir_end == std::string::npos ? std::string(path) : base.substr(0, dir_end + 1) + std::string(path);
    bool absolute = !joined.empty() && joined.front() == '/';
    std::string normalized = detail::normalize_path(joined, true);
    if (absolute && (normalized.empty() || normalized.front() != '/')) normalized.insert(0, "/");
    return normalized + tail;
}

namespace detail {

class DocumentBuilder : public HtmlScanner {
public:
    DocumentBuilder(Document& doc, const StopwordSet& stopwords) : doc_(doc), stopwords_(stopwords) {}

protected:
    void on_text(const std::string& text) override {
        if (!skip_element_.empty()) return;
        if (title_depth_ > 0) {
            if (!title_done_) title_raw_ += text;
            add_tokens(text, TokenSource::PageTitle);
        } else if (heading_depth_ > 0) {
            add_tokens(text, TokenSource::Heading);
        } else {
            add_tokens(text, TokenSource::Body);
        }
    }

    void on_start_tag(const std::string& name, const HtmlAttrs& attrs, bool self_closing) override {
        if (!skip_element_.empty()) return;
        if (name == "script" || name == "style") {
            if (!self_closing) skip_element_ = name;
            return;
        }
        if (name == "title") {
            if (!self_closing) ++title_depth_;
            return;
        }
        if (name.size() == 2 && name[0] == 'h' && name[1] >= '1' && name[1] <= '6') {
            if (!self_closing) ++heading_depth_;
            return;
        }
        if (name == "meta") {
            const std::string* meta_name = find_attr(attrs, "name");
            const std::string* content = find_attr(attrs, "content");
            if (meta_name && content) {
                std::string key = lowercase(trim(*meta_name));
                if (key == "keywords") add_tokens(*content, TokenSource::MetaKeywords);
                else if (key == "description") add_tokens(*content, TokenSource::MetaDescription);
            }
            return;
        }
        if (name == "img") {
            const std::string* alt = find_attr(attrs, "alt");
            if (alt) add_tokens(*alt, TokenSource::AltText);
            const std::string* src = find_attr(attrs, "src");
            if (src && !trim(*src).empty()) {
                std::string image_id = resolve_reference(doc_.doc_id, *src);
                auto it = image_index_.find(image_id);
                if (it == image_index_.end()) {
                    image_index_[image_id] = doc_.images.size();
                    doc_.images.push_back({image_id, alt ? *alt : std::string(), doc_.doc_id});
                } else if (alt && !alt->empty()) {
                    std::string& existing = doc_.images[it->second].alt_text;
                    if (!existing.empty()) existing += ' ';
                    existing += *alt;
                }
            }
            return;
        }
    }

    void on_end_tag(const std::string& name) override {
        if (!skip_element_.empty()) {
            if (name == skip_element_) skip_element_.clear();
            return;
        }
        if (name == "title") {
            if (title_depth_ > 0) {
                --title_depth_;
                if (title_depth_ == 0) title_done_ = true;
            }
        } else if (name.size() == 2 && name[0] == 'h' && name[1] >= '1' && name[1] <= '6') {
            if (heading_depth_ > 0) --heading_depth_;
        }
    }

public:
    // first title element only, whitespace collapsed
    std::string collapsed_title() const {
        std::string out;
        bool pending_space = false;
        for (unsigned char c : title_raw_) {
            if (c <= ' ') {
                pending_space = !out.empty();
            } else {
                if (pending_space) out += ' ';
                out += char(c);
                pending_space = false;
            }
        }
        return out;
    }

private:
    void add_tokens(std::string_view text, TokenSource source) {
        for (auto& t : tokenize(text, stopwords_)) doc_.tokens.push_back({std::move(t), source});
    }

    Document& doc_;
    const StopwordSet& stopwords_;
    std::map<std::string, size_t> image_index_;
    std::string skip_element_;
    std::string title_raw_;
    int title_depth_ = 0;
    int heading_depth_ = 0;
    bool title_done_ = false;
};

}  // namespace detail

// Best-effort extraction from real-world HTML: never aborts on malformed
// markup. Throws InvalidEncodingError when the bytes are not valid UTF-8.
inline Document parse_document(const std::string& doc_id, std::string_view html,
                               const StopwordSet& stopwords = {}) {
    if (!valid_utf8(html)) {
        throw InvalidEncodingError("document is not valid UTF-8: " + doc_id);
    }
    Document doc;
    doc.doc_id = doc_id;
    detail::DocumentBuilder builder(doc, stopwords);
    builder.scan(html);
    doc.title = builder.collapsed_title();
    return doc;
}

}  // namespace kwrank
