#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "botmine/http.hpp"
#include "botmine/types.hpp"
#include "botmine/util.hpp"

namespace botmine {

namespace detail {

inline std::string url_encode_query(const std::string& value) {
    std::string out;
    for (char c : value) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') {
            out += c;
        } else if (c == ' ') {
            out += '+';
        } else {
            static const char* hex = "0123456789ABCDEF";
            out += '%';
            out += hex[(static_cast<unsigned char>(c) >> 4) & 0xF];
            out += hex[static_cast<unsigned char>(c) & 0xF];
        }
    }
    return out;
}

inline RepoRecord repo_from_item(const json& item) {
    RepoRecord r;
    r.owner = item.at("owner").at("login").get<std::string>();
    r.name = item.at("name").get<std::string>();
    r.stars = item.value("stargazers_count", 0L);
    r.forks = item.value("forks_count", 0L);
    r.created_at = item.value("created_at", "");
    r.pushed_at = item.value("pushed_at", "");
    r.description = item["description"].is_string() ? item["description"].get<std::string>() : "";
    r.topics = item.value("topics", std::vector<std::string>{});
    r.default_branch = item.value("default_branch", "");
    return r;
}

inline std::string base64_decode(const std::string& encoded) {
    static const std::string alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::vector<int> table(256, -1);
    for (int i = 0; i < 64; ++i) table[static_cast<unsigned char>(alphabet[i])] = i;
    std::string out;
    int val = 0, bits = -8;
    for (unsigned char c : encoded) {
        if (table[c] == -1) continue;  // skips '=' padding and embedded newlines
        val = (val << 6) + table[c];
        bits += 6;
        if (bits >= 0) {
            out.push_back(static_cast<char>((val >> bits) & 0xFF));
            bits -= 8;
        }
    }
    return out;
}

}  // namespace detail

struct SearchOutcome {
    std::vector<RepoRecord> records;
    bool truncated = false;
    std::vector<std::string> warnings;
};

// Exhaustive paginated keyword search, deduplicated by (owner, name) and
// sorted for a stable record order.
inline SearchOutcome search_repositories(const HarvestQuery& query, RestClient& api,
                                         const RetryPolicy& retry = {},
                                         const Sleeper& sleep = real_sleeper()) {
    if (query.keywords.empty()) throw PreconditionError("search requires at least one keyword");
    if (query.page_size < 1 || query.page_size > 100) {
        throw PreconditionError("page_size must be in [1,100]");
    }
    SearchOutcome out;
    std::string q = detail::url_encode_query(join(query.keywords, " "));
    std::set<std::pair<std::string, std::string>> seen;
    long total_count = -1;
    for (int page = 1;; ++page) {
        std::string path = "/search/repositories?q=" + q +
                           "&per_page=" + std::to_string(query.page_size) +
                           "&page=" + std::to_string(page);
        HttpResponse resp;
        try {
            resp = get_with_retry(api, path, retry, sleep);
        } catch (const FetchFailedError& e) {
            // Hosts cap deep search pagination; report and keep the partial list.
            if (total_count >= 0 && static_cast<long>(seen.size()) < total_count) {
                out.truncated = true;
                out.warnings.push_back("search truncated by host: " + std::string(e.what()));
                break;
            }
            throw;
        }
        if (resp.status == 422 && total_count >= 0) {
            out.truncated = true;
            out.warnings.push_back("search truncated by host at page " + std::to_string(page));
            break;
        }
        if (resp.status != 200) {
            throw FetchFailedError("search failed with status " + std::to_string(resp.status));
        }
        total_count = resp.body.value("total_count", 0L);
        const auto& items = resp.body.at("items");
        for (const auto& item : items) {
            RepoRecord r = detail::repo_from_item(item);
            if (seen.insert({r.owner, r.name}).second) out.records.push_back(std::move(r));
        }
        if (items.empty() || items.size() < static_cast<size_t>(query.page_size)) break;
        if (total_count >= 0 && static_cast<long>(seen.size()) >= total_count) break;
        if (page >= 1000) {
            out.truncated = true;
            out.warnings.push_back("pagination stopped after 1000 pages");
            break;
        }
    }
    if (total_count >= 0 && static_cast<long>(out.records.size()) < total_count &&
        !out.truncated) {
        out.truncated = true;
        out.warnings.push_back("host reported " + std::to_string(total_count) +
                               " results but returned " + std::to_string(out.records.size()));
    }
    std::sort(out.records.begin(), out.records.end(),
              [](const RepoRecord& a, const RepoRecord& b) {
                  return std::tie(a.owner, a.name) < std::tie(b.owner, b.name);
              });
    return out;
}

// Pins the record to the latest commit of its default branch; repositories
// without commits are flagged empty instead.
inline RepoRecord pin_head_commit(RepoRecord repo, RestClient& api,
                                  const RetryPolicy& retry = {},
                                  const Sleeper& sleep = real_sleeper()) {
    std::string path = "/repos/" + repo.owner + "/" + repo.name + "/commits?per_page=1";
    if (!repo.default_branch.empty()) path += "&sha=" + repo.default_branch;
    HttpResponse resp = get_with_retry(api, path, retry, sleep);
    if (resp.status == 404) {
        throw NotFoundError("repository vanished: " + repo.id());
    }
    if (resp.status == 409 || (resp.status == 200 && resp.body.is_array() && resp.body.empty())) {
        repo.snapshot_sha.reset();
        repo.empty = true;
        return repo;
    }
    if (resp.status != 200 || !resp.body.is_array()) {
        throw FetchFailedError("cannot pin " + repo.id() + ", status " +
                               std::to_string(resp.status));
    }
    repo.snapshot_sha = resp.body.at(0).at("sha").get<std::string>();
    repo.empty = false;
    return repo;
}

// Materializes the pinned source tree under cache_dir/owner/name/sha using the
// tree and contents endpoints. Re-running is a no-op once the marker exists.
inline fs::path fetch_tree(const RepoRecord& repo, const fs::path& cache_dir, RestClient& api,
                           const RetryPolicy& retry = {}, const Sleeper& sleep = real_sleeper()) {
    if (!repo.snapshot_sha) {
        throw PreconditionError("fetch_tree requires a pinned snapshot commit");
    }
    fs::path root = cache_dir / repo.owner / repo.name / *repo.snapshot_sha;
    fs::path marker = root / ".botmine_complete";
    if (fs::exists(marker)) return root;

    std::string tree_path = "/repos/" + repo.owner + "/" + repo.name + "/git/trees/" +
                            *repo.snapshot_sha + "?recursive=1";
    HttpResponse tree = get_with_retry(api, tree_path, retry, sleep);
    if (tree.status != 200) {
        throw FetchFailedError("tree fetch failed for " + repo.id() + ", status " +
                               std::to_string(tree.status));
    }
    if (tree.body.value("sha", "") != *repo.snapshot_sha) {
        throw ChecksumMismatchError("tree response for " + repo.id() + " is for " +
                                    tree.body.value("sha", "<none>") + ", expected " +
                                    *repo.snapshot_sha);
    }
    for (const auto& entry : tree.body.at("tree")) {
        if (entry.value("type", "") != "blob") continue;
        std::string rel = entry.at("path").get<std::string>();
        std::string blob_path = "/repos/" + repo.owner + "/" + repo.name + "/contents/" + rel +
                                "?ref=" + *repo.snapshot_sha;
        HttpResponse blob = get_with_retry(api, blob_path, retry, sleep);
        if (blob.status != 200) {
            throw FetchFailedError("blob fetch failed for " + repo.id() + ":" + rel);
        }
        std::string content = blob.body.value("content", "");
        if (blob.body.value("encoding", "base64") == "base64") {
            content = detail::base64_decode(content);
        }
        write_file(root / rel, content);
    }
    write_file(marker, *repo.snapshot_sha + "\n");
    return root;
}

}  // namespace botmine
