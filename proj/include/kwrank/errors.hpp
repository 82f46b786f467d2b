#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kwrank {

// Base for all domain errors. kind() is a stable machine-readable tag;
// the CLI prints it as "kwrank: <kind>: <message>".
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct FetchError : Error {
    explicit FetchError(const std::string& m) : Error("fetch", m) {}
};

struct NotFoundError : Error {
    explicit NotFoundError(const std::string& m) : Error("not-found", m) {}
};

struct InvalidEncodingError : Error {
    explicit InvalidEncodingError(const std::string& m) : Error("encoding", m) {}
};

struct FormatError : Error {
    explicit FormatError(const std::string& m) : Error("format", m) {}
};

struct VocabularyError : Error {
    explicit VocabularyError(const std::string& m) : Error("vocabulary", m) {}
};

struct EmptyTableError : Error {
    explicit EmptyTableError(const std::string& m) : Error("empty-table", m) {}
};

struct EmptyInputError : Error {
    explicit EmptyInputError(const std::string& m) : Error("empty-input", m) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("config", m) {}
};

class UnknownKeywordError : public Error {
public:
    explicit UnknownKeywordError(std::vector<std::string> words)
        : Error("unknown-keyword", join(words)), words_(std::move(words)) {}

    const std::vector<std::string>& words() const noexcept { return words_; }

private:
    static std::string join(const std::vector<std::string>& words) {
        std::string s = "keyword(s) not in knowledge base vocabulary:";
        for (const auto& w : words) {
            s += ' ';
            s += w;
        }
        return s;
    }

    std::vector<std::string> words_;
};

// Thrown when ranking meets a directed cycle. cycle() is the keyword
// sequence of one offending cycle, first element repeated at the end.
class CycleError : public Error {
public:
    explicit CycleError(std::vector<std::string> cycle)
        : Error("cycle", describe(cycle)), cycle_(std::move(cycle)) {}

    const std::vector<std::string>& cycle() const noexcept { return cycle_; }

private:
    static std::string describe(const std::vector<std::string>& cycle) {
        std::string s = "knowledge base contains a cycle:";
        for (const auto& w : cycle) {
            s += ' ';
            s += w;
        }
        return s;
    }

    std::vector<std::string> cycle_;
};

}  // namespace kwrank
