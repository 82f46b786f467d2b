#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include <kwrank/errors.hpp>
#include <kwrank/fetch.hpp>
#include <kwrank/frequency.hpp>
#include <kwrank/importance.hpp>
#include <kwrank/index.hpp>
#include <kwrank/ingest.hpp>
#include <kwrank/knowledge_base.hpp>
#include <kwrank/rational.hpp>
#include <kwrank/text.hpp>

namespace kwrank {

struct PipelineConfig {
    std::string url_list_path;
    std::string kb_path;
    std::string stopwords_path;  // empty: built-in default list
    std::string index_out = "kwrank.idx";
    std::string summary_out;     // empty: no summary file
    Rational threshold{2, 5};
    int max_annotations = 10;
    std::set<TokenSource> sources = all_token_sources();
    int fetch_timeout_seconds = 10;
    int fetch_concurrency = 4;
    bool rank_all_candidates = false;
};

inline void validate_config(const PipelineConfig& config) {
    if (config.url_list_path.empty()) throw ConfigError("url_list is required");
    if (config.kb_path.empty()) throw ConfigError("kb is required");
    if (config.index_out.empty()) throw ConfigError("index_out must not be empty");
    if (!(Rational(0) < config.threshold) || Rational(1) < config.threshold)
        throw ConfigError("threshold must be in (0, 1]");
    if (config.max_annotations < 1) throw ConfigError("max_annotations must be >= 1");
    if (config.sources.empty()) throw ConfigError("sources must not be empty");
    if (config.fetch_timeout_seconds < 1) throw ConfigError("fetch_timeout must be >= 1");
    if (config.fetch_concurrency < 1) throw ConfigError("fetch_concurrency must be >= 1");
}

namespace detail {

// Input paths are taken relative to where the config (or url list) lives;
// URLs and absolute paths pass through untouched.
inline std::string resolve_input_path(const std::string& base_dir, const std::string& path) {
    if (path.empty() || base_dir.empty()) return path;
    if (path.find("://") != std::string::npos) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

inline long long parse_config_int(const std::string& key, const std::string& value) {
    try {
        size_t consumed = 0;
        long long parsed = std::stoll(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("bad integer for " + key + ": '" + value + "'");
    }
}

inline std::set<TokenSource> parse_source_list(const std::string& value) {
    std::set<TokenSource> sources;
    size_t start = 0;
    while (start <= value.size()) {
        size_t comma = value.find(',', start);
        std::string name =
            std::string(trim(std::string_view(value).substr(start, comma == std::string::npos ? comma : comma - start)));
        if (!name.empty()) {
            auto source = parse_token_source(name);
            if (!source) throw ConfigError("unknown source: '" + name + "'");
            sources.insert(*source);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (sources.empty()) throw ConfigError("sources must name at least one source");
    return sources;
}

}  // namespace detail

// key = value lines; '#' lines and blank lines are skipped. Unknown keys
// are an error so a typo cannot silently fall back to a default.
inline PipelineConfig parse_config(std::string_view text, const std::string& base_dir = "", bool validate = true) {
    PipelineConfig config;
    size_t pos = 0;
    size_t line_no = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        std::string line(detail::trim(raw));
        if (line.empty() || line[0] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        std::string key(detail::trim(std::string_view(line).substr(0, eq)));
        std::string value(detail::trim(std::string_view(line).substr(eq + 1)));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");

        if (key == "url_list") {
            config.url_list_path = detail::resolve_input_path(base_dir, value);
        } else if (key == "kb") {
            config.kb_path = detail::resolve_input_path(base_dir, value);
        } else if (key == "stopwords") {
            config.stopwords_path = detail::resolve_input_path(base_dir, value);
        } else if (key == "index_out") {
            config.index_out = value;
        } else if (key == "summary_out") {
            config.summary_out = value;
        } else if (key == "threshold") {
            try {
                config.threshold = Rational::from_string(value);
            } catch (const std::exception&) {
                throw ConfigError("bad threshold: '" + value + "'");
            }
        } else if (key == "max_annotations") {
            long long parsed = detail::parse_config_int(key, value);
            if (parsed < 1 || parsed > 1000000) throw ConfigError("max_annotations out of range: " + value);
            config.max_annotations = (int)parsed;
        } else if (key == "sources") {
            config.sources = detail::parse_source_list(value);
        } else if (key == "fetch_timeout") {
            long long parsed = detail::parse_config_int(key, value);
            if (parsed < 1 || parsed > 3600) throw ConfigError("fetch_timeout out of range: " + value);
            config.fetch_timeout_seconds = (int)parsed;
        } else if (key == "fetch_concurrency") {
            long long parsed = detail::parse_config_int(key, value);
            if (parsed < 1 || parsed > 256) throw ConfigError("fetch_concurrency out of range: " + value);
            config.fetch_concurrency = (int)parsed;
        } else if (key == "rank_all_candidates") {
            if (value == "true")
                config.rank_all_candidates = true;
            else if (value == "false")
                config.rank_all_candidates = false;
            else
                throw ConfigError("rank_all_candidates must be true or false, got '" + value + "'");
        } else {
            throw ConfigError("unknown config key: '" + key + "'");
        }
    }
    if (validate) validate_config(config);
    return config;
}

struct RankedKeyword {
    std::string keyword;
    Rational score;

    bool operator==(const RankedKeyword&) const = default;
};

struct DocumentReport {
    std::string doc_id;
    long long keywords_counted = 0;
    std::vector<CandidateEntry> candidates;
    std::vector<std::vector<RankedKeyword>> resolved_ties;
    size_t images_indexed = 0;
};

struct DocumentFailure {
    std::string doc_id;
    std::string stage;  // fetch | decode | analyze
    std::string message;
};

// processed + failed always equals entries.
struct RunSummary {
    size_t entries = 0;
    size_t processed = 0;
    size_t failed = 0;
    size_t images_indexed = 0;
    std::string kb_fingerprint;
    std::string index_path;
    std::vector<DocumentReport> documents;
    std::vector<DocumentFailure> failures;
};

namespace detail {

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(bytes.data(), (std::streamsize)bytes.size());
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline nlohmann::json summary_to_json(const RunSummary& summary) {
    nlohmann::json j;
    j["entries"] = summary.entries;
    j["processed"] = summary.processed;
    j["failed"] = summary.failed;
    j["images_indexed"] = summary.images_indexed;
    j["kb_fingerprint"] = summary.kb_fingerprint;
    j["index_path"] = summary.index_path;
    j["documents"] = nlohmann::json::array();
    for (const auto& doc : summary.documents) {
        nlohmann::json d;
        d["doc_id"] = doc.doc_id;
        d["keywords_counted"] = doc.keywords_counted;
        d["candidates"] = nlohmann::json::array();
        for (const auto& c : doc.candidates) d["candidates"].push_back({{"keyword", c.keyword}, {"count", c.count}});
        d["resolved_ties"] = nlohmann::json::array();
        for (const auto& group : doc.resolved_ties) {
            nlohmann::json g = nlohmann::json::array();
            for (const auto& member : group)
                g.push_back({{"keyword", member.keyword}, {"score", member.score.to_fraction()}});
            d["resolved_ties"].push_back(std::move(g));
        }
        d["images_indexed"] = doc.images_indexed;
        j["documents"].push_back(std::move(d));
    }
    j["failures"] = nlohmann::json::array();
    for (const auto& f : summary.failures)
        j["failures"].push_back({{"doc_id", f.doc_id}, {"stage", f.stage}, {"message", f.message}});
    return j;
}

}  // namespace detail

inline void print_summary(const RunSummary& summary, std::ostream& out) {
    out << "documents: " << summary.processed << " processed, " << summary.failed << " failed of "
        << summary.entries << "\n";
    out << "images indexed: " << summary.images_indexed << " -> " << summary.index_path << "\n";
    for (const auto& doc : summary.documents) {
        out << "  " << doc.doc_id << ": " << doc.keywords_counted << " keywords, " << doc.candidates.size()
            << " candidates";
        if (!doc.candidates.empty()) {
            out << " (";
            for (size_t i = 0; i < doc.candidates.size(); ++i) {
                if (i) out << ", ";
                out << doc.candidates[i].keyword << ":" << doc.candidates[i].count;
            }
            out << ")";
        }
        out << ", " << doc.images_indexed << " images\n";
        for (const auto& group : doc.resolved_ties) {
            out << "    tie resolved:";
            for (const auto& member : group) out << " " << member.keyword << "=" << member.score.to_decimal();
            out << "\n";
        }
    }
    for (const auto& f : summary.failures) out << "  FAILED " << f.doc_id << " (" << f.stage << "): " << f.message << "\n";
}

// End-to-end run: fetch every listed document, analyze each one, build the
// index, write it out. A bad knowledge base (unreadable, malformed, cyclic)
// aborts the whole run; a bad document only records a failure. The index
// file is written even when documents failed, and two runs over the same
// inputs produce byte-identical output.
inline RunSummary run_pipeline(const PipelineConfig& config) {
    validate_config(config);

    FetchOptions fetch_options;
    fetch_options.timeout_seconds = config.fetch_timeout_seconds;

    KnowledgeBase kb = load_kb(load_source(config.kb_path, fetch_options));
    if (auto cycle = find_any_cycle(kb)) throw CycleError(cycle->sequence);

    StopwordSet stopwords = config.stopwords_path.empty()
                                ? default_stopwords()
                                : parse_stopwords(load_source(config.stopwords_path, fetch_options));

    std::string list_text = load_source(config.url_list_path, fetch_options);
    std::vector<std::string> entries = parse_url_list(list_text);

    // Entries stay verbatim as document ids; bare relative paths are
    // fetched relative to the list file so the list works from anywhere.
    std::string list_dir;
    if (config.url_list_path.find("://") == std::string::npos)
        list_dir = std::filesystem::path(config.url_list_path).parent_path().string();
    std::vector<std::string> fetch_locations;
    fetch_locations.reserve(entries.size());
    for (const auto& entry : entries) fetch_locations.push_back(detail::resolve_input_path(list_dir, entry));

    std::vector<FetchResult> fetched = load_sources(fetch_locations, fetch_options, config.fetch_concurrency);

    RunSummary summary;
    summary.entries = entries.size();
    summary.kb_fingerprint = kb.fingerprint();
    summary.index_path = config.index_out;

    InvertedIndex index;
    for (size_t i = 0; i < entries.size(); ++i) {
        const std::string& doc_id = entries[i];
        if (!fetched[i].ok) {
            summary.failures.push_back({doc_id, "fetch", fetched[i].error});
            continue;
        }
        try {
            Document doc = parse_document(doc_id, fetched[i].bytes, stopwords);

            DocumentReport report;
            report.doc_id = doc_id;

            FrequencyTable table = count_frequencies(doc.tokens, config.sources);
            report.keywords_counted = table.total_keywords();

            CandidateSet candidates;
            candidates.threshold_fraction = config.threshold;
            if (!table.empty()) candidates = select_candidates(table, config.threshold);
            report.candidates = candidates.members;

            std::vector<TieGroup> ties = detect_ties(candidates);
            std::set<std::string> words_to_rank;
            if (config.rank_all_candidates) {
                for (const auto& c : candidates.members)
                    if (kb.contains(c.keyword)) words_to_rank.insert(c.keyword);
            } else {
                for (const auto& group : ties)
                    for (const auto& keyword : group.keywords)
                        if (kb.contains(keyword)) words_to_rank.insert(keyword);
            }
            ImportanceReport ranks = rank_all(kb, words_to_rank);

            for (const auto& group : ties) {
                std::vector<std::string> resolved = resolve_tie(kb, group);
                std::vector<RankedKeyword> order;
                order.reserve(resolved.size());
                for (auto& keyword : resolved) {
                    Rational score = ranks.score_or_zero(keyword);
                    order.push_back({std::move(keyword), score});
                }
                report.resolved_ties.push_back(std::move(order));
            }

            std::vector<AnnotatedImage> annotated =
                annotate_images(doc, candidates, ranks, config.max_annotations, stopwords);
            for (const auto& image : annotated) index.add(image);
            report.images_indexed = annotated.size();
            summary.images_indexed += annotated.size();
            summary.documents.push_back(std::move(report));
        } catch (const InvalidEncodingError& e) {
            summary.failures.push_back({doc_id, "decode", e.what()});
            continue;
        } catch (const Error& e) {
            summary.failures.push_back({doc_id, "analyze", e.what()});
            continue;
        }
        ++summary.processed;
    }
    summary.failed = summary.failures.size();

    detail::write_file(config.index_out, index.save());
    if (!config.summary_out.empty())
        detail::write_file(config.summary_out, detail::summary_to_json(summary).dump(2) + "\n");
    return summary;
}

inline std::string summary_json(const RunSummary& summary) {
    return detail::summary_to_json(summary).dump(2) + "\n";
}

}  // namespace kwrank
