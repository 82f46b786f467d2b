#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <kwrank/errors.hpp>
#include <kwrank/frequency.hpp>
#include <kwrank/importance.hpp>
#include <kwrank/ingest.hpp>
#include <kwrank/rational.hpp>
#include <kwrank/text.hpp>

namespace kwrank {

struct Annotation {
    std::string keyword;
    long long frequency = 0;
    Rational rank;

    bool operator==(const Annotation&) const = default;
};

// Ordered by (frequency desc, rank desc, keyword asc); no duplicates.
struct AnnotatedImage {
    std::string image_id;
    std::string owner_doc;
    std::vector<Annotation> annotations;

    const Annotation* find(const std::string& keyword) const {
        for (const auto& a : annotations) {
            if (a.keyword == keyword) return &a;
        }
        return nullptr;
    }

    bool operator==(const AnnotatedImage&) const = default;
};

// Assigns annotations to each image of a document: the image's own alt-text
// tokens plus the document's candidate keywords, capped at max_annotations.
// Alt tokens are privileged at the cap: a non-alt keyword of equal or lower
// frequency never survives while an alt keyword is dropped. Rank scores come
// from the report, zero for anything unreported. Images that end up with no
// annotations at all are omitted (nothing to index them under).
inline std::vector<AnnotatedImage> annotate_images(const Document& doc, const CandidateSet& candidates,
                                                   const ImportanceReport& report, int max_annotations,
                                                   const StopwordSet& stopwords = {}) {
    if (max_annotations < 1) throw std::invalid_argument("max_annotations must be >= 1");

    struct Entry {
        long long frequency = 0;
        Rational rank;
        bool from_alt = false;
    };

    std::vector<AnnotatedImage> result;
    for (const ImageRef& image : doc.images) {
        std::map<std::string, Entry> entries;
        for (auto& token : tokenize(image.alt_text, stopwords)) entries[std::move(token)].from_alt = true;
        for (const auto& candidate : candidates.members) entries[candidate.keyword].frequency = candidate.count;
        if (entries.empty()) continue;
        for (auto& [keyword, entry] : entries) entry.rank = report.score_or_zero(keyword);

        std::vector<std::pair<std::string, Entry>> picked(entries.begin(), entries.end());
        std::sort(picked.begin(), picked.end(), [](const auto& a, const auto& b) {
            if (a.second.frequency != b.second.frequency) return a.second.frequency > b.second.frequency;
            if (a.second.from_alt != b.second.from_alt) return a.second.from_alt;
            if (a.second.rank != b.second.rank) return a.second.rank > b.second.rank;
            return a.first < b.first;
        });
        if ((int)picked.size() > max_annotations) picked.resize(max_annotations);

        AnnotatedImage annotated;
        annotated.image_id = image.image_id;
        annotated.owner_doc = image.owner_doc;
        for (auto& [keyword, entry] : picked)
            annotated.annotations.push_back({std::move(keyword), entry.frequency, entry.rank});
        std::sort(annotated.annotations.begin(), annotated.annotations.end(),
                  [](const Annotation& a, const Annotation& b) {
                      if (a.frequency != b.frequency) return a.frequency > b.frequency;
                      if (a.rank != b.rank) return a.rank > b.rank;
                      return a.keyword < b.keyword;
                  });
        result.push_back(std::move(annotated));
    }
    return result;
}

// Keyword -> images map with replacement semantics on re-add. Single writer,
// any number of concurrent readers between mutations.
class InvertedIndex {
public:
    void add(const AnnotatedImage& image) {
        validate(image);
        auto it = images_.find(image.image_id);
        if (it != images_.end()) {
            for (const auto& old : it->second.annotations) {
                auto posting = postings_.find(old.keyword);
                if (posting != postings_.end()) {
                    posting->second.erase(image.image_id);
                    if (posting->second.empty()) postings_.erase(posting);
                }
            }
        }
        images_[image.image_id] = image;
        for (const auto& annotation : image.annotations) postings_[annotation.keyword].insert(image.image_id);
    }

    void add(std::span<const AnnotatedImage> images) {
        for (const auto& image : images) add(image);
    }

    // Images annotated with the keyword, best entry first: the matching
    // annotation's (frequency desc, rank desc), then image id. The query
    // string is normalized like any other keyword, so "B" finds "b".
    std::vector<AnnotatedImage> query(const std::string& raw_keyword) const {
        auto keyword = normalize_keyword(raw_keyword);
        if (!keyword) return {};
        auto posting = postings_.find(*keyword);
        if (posting == postings_.end()) return {};
        std::vector<const AnnotatedImage*> hits;
        hits.reserve(posting->second.size());
        for (const auto& id : posting->second) hits.push_back(&images_.at(id));
        std::sort(hits.begin(), hits.end(), [&](const AnnotatedImage* a, const AnnotatedImage* b) {
            const Annotation* ka = a->find(*keyword);
            const Annotation* kb = b->find(*keyword);
            if (ka->frequency != kb->frequency) return ka->frequency > kb->frequency;
            if (ka->rank != kb->rank) return ka->rank > kb->rank;
            return a->image_id < b->image_id;
        });
        std::vector<AnnotatedImage> result;
        result.reserve(hits.size());
        for (const auto* hit : hits) result.push_back(*hit);
        return result;
    }

    const std::map<std::string, AnnotatedImage>& images() const { return images_; }
    const std::map<std::string, std::set<std::string>>& postings() const { return postings_; }
    std::size_t image_count() const { return images_.size(); }
    bool empty() const { return images_.empty(); }

    // Walks both maps and throws if they disagree anywhere.
    void audit_consistency() const {
        for (const auto& [keyword, ids] : postings_) {
            if (ids.empty()) throw std::logic_error("empty posting list for " + keyword);
            for (const auto& id : ids) {
                auto it = images_.find(id);
                if (it == images_.end() || !it->second.find(keyword))
                    throw std::logic_error("posting " + keyword + " -> " + id + " has no matching annotation");
            }
        }
        for (const auto& [id, image] : images_) {
            for (const auto& annotation : image.annotations) {
                auto posting = postings_.find(annotation.keyword);
                if (posting == postings_.end() || !posting->second.count(id))
                    throw std::logic_error("annotation " + annotation.keyword + " on " + id + " missing from postings");
            }
        }
    }

    bool operator==(const InvertedIndex& other) const {
        return images_ == other.images_ && postings_ == other.postings_;
    }

    // --- persistence ----------------------------------------------------
    //
    //   kwrankidx 1
    //   image_id<TAB>owner_doc<TAB>keyword:count:num/den<TAB>...
    //
    // One record per image, records sorted by image id, annotation order
    // preserved. Line-oriented so diffs and hand inspection stay easy.

    std::string save() const {
        std::string out = "kwrankidx 1\n";
        for (const auto& [id, image] : images_) {
            for (const auto* field : {&id, &image.owner_doc}) {
                if (field->find_first_of("\t\n") != std::string::npos)
                    throw FormatError("image record contains tab or newline: " + *field);
            }
            out += id;
            out += '\t';
            out += image.owner_doc;
            for (const auto& a : image.annotations) {
                out += '\t';
                out += a.keyword;
                out += ':';
                out += std::to_string(a.frequency);
                out += ':';
                out += a.rank.to_fraction();
            }
            out += '\n';
        }
        return out;
    }

    static InvertedIndex load(std::string_view bytes) {
        InvertedIndex index;
        size_t pos = 0;
        size_t line_no = 0;
        bool version_seen = false;
        while (pos <= bytes.size()) {
            size_t eol = bytes.find('\n', pos);
            std::string_view line =
                bytes.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
            bool last = eol == std::string_view::npos;
            pos = last ? bytes.size() + 1 : eol + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            if (!version_seen) {
                if (line != "kwrankidx 1")
                    throw FormatError("index version tag mismatch: expected 'kwrankidx 1'");
                version_seen = true;
                continue;
            }
            if (line.empty()) {
                if (!last) throw FormatError("blank record on line " + std::to_string(line_no));
                continue;
            }
            index.add(parse_record(line, line_no));
        }
        if (!version_seen) throw FormatError("index version tag mismatch: empty file");
        return index;
    }

private:
    static void validate(const AnnotatedImage& image) {
        if (image.image_id.empty()) throw std::invalid_argument("image with empty id");
        if (image.annotations.empty())
            throw std::invalid_argument("image with no annotations cannot be indexed: " + image.image_id);
        std::set<std::string> seen;
        for (const auto& annotation : image.annotations) {
            if (annotation.keyword.empty() ||
                annotation.keyword.find_first_of(":\t\n") != std::string::npos)
                throw std::invalid_argument("annotation keyword not storable: '" + annotation.keyword + "'");
            if (annotation.frequency < 0)
                throw std::invalid_argument("negative annotation frequency on " + image.image_id);
            if (!seen.insert(annotation.keyword).second)
                throw std::invalid_argument("duplicate annotation keyword " + annotation.keyword + " on " +
                                            image.image_id);
        }
    }

    static AnnotatedImage parse_record(std::string_view line, size_t line_no) {
        std::vector<std::string_view> fields;
        size_t pos = 0;
        while (pos <= line.size()) {
            size_t tab = line.find('\t', pos);
            fields.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
            if (tab == std::string_view::npos) break;
            pos = tab + 1;
        }
        if (fields.size() < 3)
            throw FormatError("truncated record on line " + std::to_string(line_no));
        AnnotatedImage image;
        image.image_id = std::string(fields[0]);
        image.owner_doc = std::string(fields[1]);
        for (size_t i = 2; i < fields.size(); ++i) {
            std::string_view triple = fields[i];
            size_t c1 = triple.find(':');
            size_t c2 = c1 == std::string_view::npos ? std::string_view::npos : triple.find(':', c1 + 1);
            if (c2 == std::string_view::npos || triple.find(':', c2 + 1) != std::string_view::npos)
                throw FormatError("malformed annotation triple on line " + std::to_string(line_no) + ": " +
                                  std::string(triple));
            Annotation annotation;
            annotation.keyword = std::string(triple.substr(0, c1));
            try {
                std::string count(triple.substr(c1 + 1, c2 - c1 - 1));
                size_t consumed = 0;
                annotation.frequency = std::stoll(count, &consumed);
                if (consumed != count.size()) throw std::invalid_argument(count);
                annotation.rank = Rational::from_string(triple.substr(c2 + 1));
            } catch (const FormatError&) {
                throw;
            } catch (const std::exception&) {
                throw FormatError("malformed annotation triple on line " + std::to_string(line_no) + ": " +
                                  std::string(triple));
            }
            image.annotations.push_back(std::move(annotation));
        }
        return image;
    }

    std::map<std::string, AnnotatedImage> images_;
    std::map<std::string, std::set<std::string>> postings_;
};

}  // namespace kwrank
