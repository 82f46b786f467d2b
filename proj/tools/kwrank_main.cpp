#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <kwrank/errors.hpp>
#include <kwrank/fetch.hpp>
#include <kwrank/frequency.hpp>
#include <kwrank/importance.hpp>
#include <kwrank/index.hpp>
#include <kwrank/ingest.hpp>
#include <kwrank/knowledge_base.hpp>
#include <kwrank/pipeline.hpp>
#include <kwrank/rational.hpp>
#include <kwrank/text.hpp>

namespace {

kwrank::Rational fraction_flag(const std::string& text, const char* flag) {
    try {
        return kwrank::Rational::from_string(text);
    } catch (const std::exception&) {
        throw CLI::ValidationError(std::string(flag) + ": not a fraction or decimal: '" + text + "'");
    }
}

std::set<kwrank::TokenSource> sources_flag(const std::string& text) {
    try {
        return kwrank::detail::parse_source_list(text);
    } catch (const kwrank::ConfigError& e) {
        throw CLI::ValidationError(std::string("--sources: ") + e.what());
    }
}

std::string parent_dir(const std::string& path) {
    if (path.find("://") != std::string::npos) return "";
    return std::filesystem::path(path).parent_path().string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"keyword extraction, correlation ranking and image indexing"};
    app.set_version_flag("--version", "kwrank 0.1.0");
    app.require_subcommand(1);

    // run ------------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "fetch, analyze and index every document in a url list");
    std::string config_path;
    run_cmd->add_option("--config", config_path, "pipeline config file (key = value lines)")
        ->envname("KWRANK_CONFIG");
    std::string opt_urls, opt_kb, opt_stopwords, opt_index_out, opt_summary_out, opt_threshold, opt_sources;
    int opt_max_annotations = 0;
    int opt_timeout = 0;
    int opt_concurrency = 0;
    bool opt_rank_all = false;
    auto* o_urls = run_cmd->add_option("--urls", opt_urls, "url list file, one document location per line");
    auto* o_kb = run_cmd->add_option("--kb", opt_kb, "knowledge base file");
    auto* o_stop = run_cmd->add_option("--stopwords", opt_stopwords, "stopword list, one word per line");
    auto* o_index = run_cmd->add_option("--index-out", opt_index_out, "where to write the image index");
    auto* o_summary = run_cmd->add_option("--summary-out", opt_summary_out, "where to write the JSON run summary");
    auto* o_thresh = run_cmd->add_option("--threshold", opt_threshold, "candidate fraction, e.g. 0.4 or 2/5");
    auto* o_maxann = run_cmd->add_option("--max-annotations", opt_max_annotations, "annotation cap per image");
    auto* o_sources = run_cmd->add_option("--sources", opt_sources,
                                          "comma list of alt,title,meta-keywords,meta-description,heading,body");
    auto* o_timeout = run_cmd->add_option("--timeout", opt_timeout, "fetch timeout in seconds");
    auto* o_conc = run_cmd->add_option("--concurrency", opt_concurrency, "parallel fetches");
    auto* o_rankall = run_cmd->add_flag("--rank-all", opt_rank_all, "rank every candidate, not only tied ones");

    run_cmd->callback([&]() {
        kwrank::PipelineConfig config;
        if (!config_path.empty())
            config = kwrank::parse_config(kwrank::load_source(config_path), parent_dir(config_path), false);
        if (o_urls->count()) config.url_list_path = opt_urls;
        if (o_kb->count()) config.kb_path = opt_kb;
        if (o_stop->count()) config.stopwords_path = opt_stopwords;
        if (o_index->count()) config.index_out = opt_index_out;
        if (o_summary->count()) config.summary_out = opt_summary_out;
        if (o_thresh->count()) config.threshold = fraction_flag(opt_threshold, "--threshold");
        if (o_maxann->count()) config.max_annotations = opt_max_annotations;
        if (o_sources->count()) config.sources = sources_flag(opt_sources);
        if (o_timeout->count()) config.fetch_timeout_seconds = opt_timeout;
        if (o_conc->count()) config.fetch_concurrency = opt_concurrency;
        if (o_rankall->count()) config.rank_all_candidates = opt_rank_all;
        kwrank::validate_config(config);
        kwrank::RunSummary summary = kwrank::run_pipeline(config);
        kwrank::print_summary(summary, std::cout);
    });

    // rank -----------------------------------------------------------------
    auto* rank_cmd = app.add_subcommand("rank", "correlation rank of keywords against a knowledge base");
    std::string rank_kb_path;
    std::vector<std::string> rank_words;
    rank_cmd->add_option("--kb", rank_kb_path, "knowledge base file")->required();
    rank_cmd->add_option("words", rank_words, "keywords to rank")->required();
    rank_cmd->callback([&]() {
        kwrank::KnowledgeBase kb = kwrank::load_kb(kwrank::load_source(rank_kb_path));
        std::set<std::string> words;
        for (const auto& raw : rank_words) {
            auto normalized = kwrank::normalize_keyword(raw);
            words.insert(normalized ? *normalized : kwrank::detail::lowercase(raw));
        }
        std::cout << kwrank::report_to_tsv(kwrank::rank_all(kb, words));
    });

    // candidates -------------------------------------------------------------
    auto* cand_cmd = app.add_subcommand("candidates", "candidate keywords of one document");
    std::string cand_threshold = "2/5";
    std::string cand_sources;
    std::string cand_stopwords;
    std::string cand_file;
    cand_cmd->add_option("--threshold", cand_threshold, "candidate fraction, e.g. 0.4 or 2/5");
    auto* c_sources = cand_cmd->add_option("--sources", cand_sources,
                                           "comma list of alt,title,meta-keywords,meta-description,heading,body");
    cand_cmd->add_option("--stopwords", cand_stopwords, "stopword list, one word per line");
    cand_cmd->add_option("file", cand_file, "HTML document, local path or URL")->required();
    cand_cmd->callback([&]() {
        kwrank::Rational threshold = fraction_flag(cand_threshold, "--threshold");
        std::set<kwrank::TokenSource> sources =
            c_sources->count() ? sources_flag(cand_sources) : kwrank::all_token_sources();
        kwrank::StopwordSet stopwords = cand_stopwords.empty()
                                            ? kwrank::default_stopwords()
                                            : kwrank::parse_stopwords(kwrank::load_source(cand_stopwords));
        kwrank::Document doc = kwrank::parse_document(cand_file, kwrank::load_source(cand_file), stopwords);
        kwrank::FrequencyTable table = kwrank::count_frequencies(doc.tokens, sources);
        kwrank::CandidateSet candidates = kwrank::select_candidates(table, threshold);
        for (const auto& entry : candidates.members) std::cout << entry.keyword << "\t" << entry.count << "\n";
    });

    // mine -------------------------------------------------------------------
    auto* mine_cmd = app.add_subcommand("mine", "mine correlation rules from keyword transactions");
    std::string mine_support, mine_confidence, mine_file;
    mine_cmd->add_option("--min-support", mine_support, "support threshold, e.g. 0.5 or 1/2")->required();
    mine_cmd->add_option("--min-confidence", mine_confidence, "confidence threshold, e.g. 0.6 or 3/5")->required();
    mine_cmd->add_option("transactions", mine_file, "transactions file, one whitespace-separated set per line")
        ->required();
    mine_cmd->callback([&]() {
        kwrank::KnowledgeBase kb =
            kwrank::mine_rules(kwrank::parse_transactions(kwrank::load_source(mine_file)),
                               fraction_flag(mine_support, "--min-support"),
                               fraction_flag(mine_confidence, "--min-confidence"));
        std::cout << kwrank::save_kb(kb);
    });

    // query ------------------------------------------------------------------
    auto* query_cmd = app.add_subcommand("query", "look a keyword up in a saved image index");
    std::string query_index_path, query_keyword;
    query_cmd->add_option("--index", query_index_path, "index file written by run")->required();
    query_cmd->add_option("keyword", query_keyword, "keyword to look up")->required();
    query_cmd->callback([&]() {
        kwrank::InvertedIndex index = kwrank::InvertedIndex::load(kwrank::load_source(query_index_path));
        auto normalized = kwrank::normalize_keyword(query_keyword);
        if (!normalized) return;
        for (const auto& image : index.query(query_keyword)) {
            const kwrank::Annotation* hit = image.find(*normalized);
            std::cout << image.image_id << "\t" << image.owner_doc << "\t" << hit->frequency << "\t"
                      << hit->rank.to_decimal() << "\n";
        }
    });

    // validate-kb --------------------------------------------------------------
    auto* validate_cmd = app.add_subcommand("validate-kb", "parse a knowledge base and check it for cycles");
    std::string validate_path;
    validate_cmd->add_option("file", validate_path, "knowledge base file")->required();
    validate_cmd->callback([&]() {
        std::vector<std::string> warnings;
        kwrank::KnowledgeBase kb = kwrank::load_kb(kwrank::load_source(validate_path), &warnings);
        for (const auto& warning : warnings) std::cerr << "warning: " << warning << "\n";
        if (auto cycle = kwrank::find_any_cycle(kb)) throw kwrank::CycleError(cycle->sequence);
        std::cout << "ok: " << kb.rules().size() << " rules, " << kb.n_total() << " keywords, fingerprint "
                  << kb.fingerprint() << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const kwrank::Error& e) {
        std::cerr << "kwrank: " << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "kwrank: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
