#pragma once

#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "botmine/util.hpp"

namespace botmine {

enum class CandidateStatus { Valid, SyntacticallyInvalid, Misclassified };

inline const char* to_string(CandidateStatus s) {
    switch (s) {
        case CandidateStatus::Valid: return "valid";
        case CandidateStatus::SyntacticallyInvalid: return "syntactically_invalid";
        case CandidateStatus::Misclassified: return "misclassified";
    }
    return "?";
}

struct DomainCandidate {
    std::string rel_path;
    CandidateStatus status;
};

enum class RepoClass { ChatbotRepo, NonChatbotRepo };

namespace detail {

constexpr uintmax_t kMaxYamlBytes = 5ull * 1024 * 1024;

inline bool contains_key_recursive(const YAML::Node& node, const std::string& key) {
    if (node.IsMap()) {
        for (const auto& kv : node) {
            if (kv.first.IsScalar() && kv.first.as<std::string>() == key) return true;
            if (contains_key_recursive(kv.second, key)) return true;
        }
    } else if (node.IsSequence()) {
        for (const auto& e : node) {
            if (contains_key_recursive(e, key)) return true;
        }
    }
    return false;
}

}  // namespace detail

// Examines every YAML file under the tree. A file becomes a candidate when it
// either fails to parse, carries a top-level "intents" key (Valid), or
// mentions "intents" only in the wrong place (Misclassified).
inline std::vector<DomainCandidate> find_domain_candidates(const fs::path& tree_root,
                                                           StageLog* log = nullptr) {
    std::vector<DomainCandidate> out;
    for (const auto& rel : list_files(tree_root)) {
        std::string ext = extension_lower(rel);
        if (ext != ".yml" && ext != ".yaml") continue;
        fs::path abs = tree_root / rel;
        std::error_code ec;
        uintmax_t size = fs::file_size(abs, ec);
        if (!ec && size > detail::kMaxYamlBytes) {
            if (log) log->warn("skipping oversized YAML file " + rel);
            continue;
        }
        std::string text;
        try {
            text = read_file(abs);
        } catch (const IoError& e) {
            if (log) log->warn(std::string("unreadable file skipped: ") + e.what());
            continue;
        }
        std::vector<YAML::Node> docs;
        try {
            docs = YAML::LoadAll(text);
        } catch (const YAML::Exception&) {
            out.push_back({rel, CandidateStatus::SyntacticallyInvalid});
            continue;
        }
        bool top_level = false;
        bool nested = false;
        for (const auto& doc : docs) {
            if (doc.IsMap() && doc["intents"]) {
                top_level = true;
                break;
            }
            if (detail::contains_key_recursive(doc, "intents")) nested = true;
        }
        if (top_level) {
            out.push_back({rel, CandidateStatus::Valid});
        } else if (nested) {
            out.push_back({rel, CandidateStatus::Misclassified});
        }
    }
    return out;  // list_files is sorted, so candidates are sorted by rel_path
}

inline RepoClass classify_repo(const std::vector<DomainCandidate>& candidates) {
    for (const auto& c : candidates) {
        if (c.status == CandidateStatus::Valid) return RepoClass::ChatbotRepo;
    }
    return RepoClass::NonChatbotRepo;
}

}  // namespace botmine
