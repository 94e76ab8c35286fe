#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace botmine {

using json = nlohmann::json;

// One hosted repository pinned to a snapshot commit.
struct RepoRecord {
    std::string owner;
    std::string name;
    std::optional<std::string> snapshot_sha;
    bool empty = false;  // set iff the repository had no commits to pin
    long stars = 0;
    long forks = 0;
    std::string created_at;  // ISO-8601, lexicographic order == time order
    std::string pushed_at;
    std::string description;
    std::vector<std::string> topics;
    std::string default_branch;

    std::string id() const { return owner + "/" + name; }
};

inline void to_json(json& j, const RepoRecord& r) {
    j = json{{"owner", r.owner},
             {"name", r.name},
             {"snapshot_sha", r.snapshot_sha ? json(*r.snapshot_sha) : json(nullptr)},
             {"empty", r.empty},
             {"stars", r.stars},
             {"forks", r.forks},
             {"created_at", r.created_at},
             {"pushed_at", r.pushed_at},
             {"description", r.description},
             {"topics", r.topics},
             {"default_branch", r.default_branch}};
}

inline void from_json(const json& j, RepoRecord& r) {
    j.at("owner").get_to(r.owner);
    j.at("name").get_to(r.name);
    if (j.contains("snapshot_sha") && !j["snapshot_sha"].is_null()) {
        r.snapshot_sha = j["snapshot_sha"].get<std::string>();
    } else {
        r.snapshot_sha.reset();
    }
    r.empty = j.value("empty", false);
    r.stars = j.value("stars", 0L);
    r.forks = j.value("forks", 0L);
    r.created_at = j.value("created_at", "");
    r.pushed_at = j.value("pushed_at", "");
    r.description = j.value("description", "");
    r.topics = j.value("topics", std::vector<std::string>{});
    r.default_branch = j.value("default_branch", "");
}

struct HarvestQuery {
    std::vector<std::string> keywords;
    std::string snapshot_date;
    int page_size = 100;
};

struct RateLimitedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AuthMissingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FetchFailedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ChecksumMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DetectorUnavailableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LlmUnavailableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Review import problems; carries the offending 1-based row number.
struct ReviewError : std::runtime_error {
    int row;
    ReviewError(const std::string& msg, int row_number)
        : std::runtime_error(msg + " (row " + std::to_string(row_number) + ")"), row(row_number) {}
};

}  // namespace botmine
