#pragma once

#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>

#include <kwrank/errors.hpp>
#include <kwrank/text.hpp>

namespace kwrank {

struct FetchOptions {
    int timeout_seconds = 10;
    std::string user_agent = "kwrank/0.1";
};

namespace detail {

inline bool has_prefix_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (size_t i = 0; i < prefix.size(); ++i) {
        if (ascii_lower(s[i]) != prefix[i]) return false;
    }
    return true;
}

inline std::string read_local_file(const std::string& path) {
    std::error_code ec;
    auto status = std::filesystem::status(path, ec);
    if (ec || status.type() == std::filesystem::file_type::not_found)
        throw NotFoundError("no such file: " + path);
    if (status.type() == std::filesystem::file_type::directory)
        throw FetchError("not a regular file: " + path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FetchError("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw FetchError("read failed: " + path);
    return std::move(buffer).str();
}

inline std::string fetch_http(const std::string& url, const FetchOptions& options) {
    bool https = has_prefix_ci(url, "https://");
    size_t host_start = url.find("//") + 2;
    size_t path_start = url.find('/', host_start);
    std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    // Fragments are a client-side concept; never send them on the wire.
    if (size_t hash = path.find('#'); hash != std::string::npos) path.resize(hash);
    if (path.empty()) path = "/";
    if (base.size() == host_start) throw FetchError("no host in url: " + url);

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (https) throw FetchError("https support not compiled in: " + url);
#endif
    httplib::Client client(base);
    client.set_connection_timeout(options.timeout_seconds, 0);
    client.set_read_timeout(options.timeout_seconds, 0);
    client.set_write_timeout(options.timeout_seconds, 0);
    client.set_follow_location(true);
    client.set_default_headers({{"User-Agent", options.user_agent}});
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
    if (https) client.enable_server_certificate_verification(false);
#endif

    auto response = client.Get(path);
    if (!response) throw FetchError(url + ": " + httplib::to_string(response.error()));
    if (response->status >= 400)
        throw FetchError(url + ": server returned status " + std::to_string(response->status));
    return response->body;
}

}  // namespace detail

// Reads one location, either a local path (optionally file://) or an
// http(s) URL. Returns raw bytes; encoding is the caller's problem.
inline std::string load_source(const std::string& location, const FetchOptions& options = {}) {
    if (location.empty()) throw FetchError("empty location");
    if (detail::has_prefix_ci(location, "http://") || detail::has_prefix_ci(location, "https://"))
        return detail::fetch_http(location, options);
    if (detail::has_prefix_ci(location, "file://")) return detail::read_local_file(location.substr(7));
    if (size_t scheme_end = location.find("://"); scheme_end != std::string::npos) {
        bool looks_like_scheme = scheme_end > 0 && (std::isalpha)((unsigned char)location[0]);
        for (size_t i = 1; looks_like_scheme && i < scheme_end; ++i) {
            char c = location[i];
            looks_like_scheme = (std::isalnum)((unsigned char)c) || c == '+' || c == '-' || c == '.';
        }
        if (looks_like_scheme) throw FetchError("unsupported scheme: " + location);
    }
    return detail::read_local_file(location);
}

struct FetchResult {
    std::string location;
    bool ok = false;
    std::string bytes;
    std::string error;  // meaningful only when !ok
};

// Fetches every location with at most `concurrency` requests in flight.
// Results come back in input order; per-location failures are recorded,
// never thrown, so one dead server cannot sink the batch.
inline std::vector<FetchResult> load_sources(const std::vector<std::string>& locations,
                                             const FetchOptions& options = {}, int concurrency = 4) {
    std::vector<FetchResult> results(locations.size());
    if (locations.empty()) return results;
    if (concurrency < 1) concurrency = 1;
    if ((size_t)concurrency > locations.size()) concurrency = (int)locations.size();

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= locations.size()) return;
            FetchResult& slot = results[i];
            slot.location = locations[i];
            try {
                slot.bytes = load_source(locations[i], options);
                slot.ok = true;
            } catch (const Error& e) {
                slot.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(concurrency);
    for (int i = 0; i < concurrency; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

// One location per line. Blank lines and lines starting with '#' are
// skipped; '#' elsewhere is kept, URLs may legitimately contain fragments.
inline std::vector<std::string> parse_url_list(std::string_view text) {
    std::vector<std::string> locations;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        std::string trimmed(detail::trim(line));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        locations.push_back(std::move(trimmed));
    }
    return locations;
}

}  // namespace kwrank
