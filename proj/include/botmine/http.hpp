#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "botmine/types.hpp"
#include "botmine/util.hpp"

namespace botmine {

struct HttpResponse {
    int status = 0;
    json body;
    std::map<std::string, std::string> headers;

    bool rate_limited() const {
        if (status == 429) return true;
        auto it = headers.find("X-RateLimit-Remaining");
        return status == 403 && it != headers.end() && it->second == "0";
    }
};

// Sorts query parameters so that recorded and replayed requests agree on one
// spelling of each URL.
inline std::string canonical_request(const std::string& path_and_query) {
    auto qpos = path_and_query.find('?');
    if (qpos == std::string::npos) return path_and_query;
    std::string path = path_and_query.substr(0, qpos);
    auto params = split(path_and_query.substr(qpos + 1), '&');
    std::sort(params.begin(), params.end());
    return path + "?" + join(params, "&");
}

// Fixture file name for a canonicalized request: anything outside
// [A-Za-z0-9._-] becomes '_'. Names stay human-readable and diffable.
inline std::string fixture_file_name(const std::string& canonical) {
    std::string out;
    for (char c : canonical) {
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
        out += ok ? c : '_';
    }
    return out + ".json";
}

class RestClient {
public:
    virtual ~RestClient() = default;
    virtual HttpResponse get(const std::string& path_and_query) = 0;
    virtual int request_count() const = 0;
};

// Serves recorded responses from one JSON file per request. A fixture holds
// either {"status", "body"} or {"responses": [...]} consumed in order of
// occurrence (the last entry repeats).
class ReplayRestClient : public RestClient {
public:
    explicit ReplayRestClient(fs::path fixture_dir) : dir_(std::move(fixture_dir)) {}

    HttpResponse get(const std::string& path_and_query) override {
        std::lock_guard<std::mutex> lock(mu_);
        ++count_;
        std::string key = canonical_request(path_and_query);
        fs::path file = dir_ / fixture_file_name(key);
        if (!fs::exists(file)) {
            throw IoError("no recorded response for " + key + " (expected " + file.string() +
                          ")");
        }
        json j = json::parse(read_file(file));
        json entry;
        if (j.contains("responses")) {
            const auto& rs = j["responses"];
            size_t idx = std::min(occurrence_[key]++, rs.size() - 1);
            entry = rs[idx];
        } else {
            entry = j;
        }
        HttpResponse r;
        r.status = entry.value("status", 200);
        r.body = entry.contains("body") ? entry["body"] : json(nullptr);
        if (entry.contains("headers")) {
            for (auto& [k, v] : entry["headers"].items()) r.headers[k] = v.get<std::string>();
        }
        return r;
    }

    int request_count() const override { return count_; }

    // Writes a fixture in the exact shape get() expects.
    static void record(const fs::path& dir, const std::string& path_and_query,
                       const json& fixture) {
        write_file(dir / fixture_file_name(canonical_request(path_and_query)),
                   fixture.dump(2) + "\n");
    }

private:
    fs::path dir_;
    std::map<std::string, size_t> occurrence_;
    int count_ = 0;
    std::mutex mu_;
};

class LiveRestClient : public RestClient {
public:
    LiveRestClient(std::string base_url, const char* token_env = "BOTMINE_HOST_TOKEN")
        : base_url_(std::move(base_url)) {
        const char* tok = token_env ? std::getenv(token_env) : nullptr;
        if (token_env && (!tok || !*tok)) {
            throw AuthMissingError(std::string("live mode requested but ") + token_env +
                                   " is not set");
        }
        if (tok) token_ = tok;
    }

    HttpResponse get(const std::string& path_and_query) override {
        {
            std::lock_guard<std::mutex> lock(mu_);
            ++count_;
        }
        httplib::Client cli(base_url_);
        cli.set_follow_location(true);
        httplib::Headers headers{{"User-Agent", "botmine"},
                                 {"Accept", "application/vnd.github+json"}};
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
        auto res = cli.Get(path_and_query, headers);
        if (!res) throw FetchFailedError("request failed: " + path_and_query);
        HttpResponse r;
        r.status = res->status;
        for (const auto& [k, v] : res->headers) r.headers[k] = v;
        r.body = json::parse(res->body, nullptr, false);
        if (r.body.is_discarded()) r.body = res->body;
        return r;
    }

    int request_count() const override {
        std::lock_guard<std::mutex> lock(mu_);
        return count_;
    }

private:
    std::string base_url_;
    std::string token_;
    int count_ = 0;
    mutable std::mutex mu_;
};

using Sleeper = std::function<void(int)>;

inline Sleeper real_sleeper() {
    return [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
}

inline Sleeper no_sleep() {
    return [](int) {};
}

struct RetryPolicy {
    std::vector<int> delays_ms{1000, 4000, 16000};
};

// Bounded retry with backoff on rate limits and transient failures.
inline HttpResponse get_with_retry(RestClient& client, const std::string& path,
                                   const RetryPolicy& policy = {},
                                   const Sleeper& sleep = real_sleeper()) {
    size_t attempt = 0;
    for (;;) {
        std::optional<HttpResponse> resp;
        try {
            resp = client.get(path);
        } catch (const FetchFailedError&) {
            if (attempt >= policy.delays_ms.size()) throw;
        }
        if (resp) {
            if (!resp->rate_limited() && resp->status < 500) return *resp;
            if (attempt >= policy.delays_ms.size()) {
                if (resp->rate_limited()) throw RateLimitedError("rate limited: " + path);
                throw FetchFailedError("server error " + std::to_string(resp->status) + ": " +
                                       path);
            }
        }
        sleep(policy.delays_ms[attempt++]);
    }
}

}  // namespace botmine
