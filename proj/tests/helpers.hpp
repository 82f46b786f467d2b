#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <kwrank/knowledge_base.hpp>

namespace testutil {

inline std::string fixture_path(const std::string& rel) {
    return std::string(KWRANK_FIXTURE_DIR) + "/" + rel;
}

inline std::string data_path(const std::string& rel) {
    return std::string(KWRANK_DATA_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("test fixture missing: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(bytes.data(), (std::streamsize)bytes.size());
}

// Scratch directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        for (int attempt = 0; attempt < 64; ++attempt) {
            auto candidate = base / ("kwrank_test_" + std::to_string(rd()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Random DAG: nodes w0..w{n-1}, every edge goes from a lower index to a
// higher one, so the graph is acyclic by construction. The full node set is
// declared as the vocabulary, isolated nodes included.
inline kwrank::KnowledgeBase random_acyclic_kb(std::mt19937_64& rng, int max_nodes = 12, int max_edges = 20) {
    int nodes = std::uniform_int_distribution<int>(2, max_nodes)(rng);
    int want_edges = std::uniform_int_distribution<int>(1, max_edges)(rng);
    std::set<std::pair<int, int>> picked;
    std::uniform_int_distribution<int> node_dist(0, nodes - 1);
    for (int i = 0; i < want_edges * 3 && (int)picked.size() < want_edges; ++i) {
        int a = node_dist(rng);
        int b = node_dist(rng);
        if (a == b) continue;
        picked.insert({std::min(a, b), std::max(a, b)});
    }
    if (picked.empty()) picked.insert({0, 1});
    std::vector<kwrank::Rule> rules;
    long long id = 1;
    for (const auto& [a, b] : picked)
        rules.push_back({id++, "w" + std::to_string(a), "w" + std::to_string(b), ""});
    std::set<std::string> vocabulary;
    for (int i = 0; i < nodes; ++i) vocabulary.insert("w" + std::to_string(i));
    return kwrank::KnowledgeBase(std::move(rules), std::move(vocabulary));
}

// Same construction plus one deliberate back edge; second member of the
// result names a word that sits on the cycle.
inline std::pair<kwrank::KnowledgeBase, std::string> random_cyclic_kb(std::mt19937_64& rng, int max_nodes = 12,
                                                                      int max_edges = 20) {
    kwrank::KnowledgeBase dag = random_acyclic_kb(rng, max_nodes, max_edges);
    std::vector<kwrank::Rule> rules = dag.rules();
    size_t chosen = std::uniform_int_distribution<size_t>(0, rules.size() - 1)(rng);
    std::string from = rules[chosen].consequent;
    std::string to = rules[chosen].antecedent;
    bool already = false;
    for (const auto& rule : rules) already = already || (rule.antecedent == from && rule.consequent == to);
    if (!already) rules.push_back({(long long)rules.size() + 1, from, to, ""});
    std::set<std::string> vocabulary = dag.vocabulary();
    return {kwrank::KnowledgeBase(std::move(rules), std::move(vocabulary)), from};
}

}  // namespace testutil
