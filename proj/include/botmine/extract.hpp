#pragma once

#include <algorithm>
#include <map>
#include <regex>
#include <string>
#include <vector>

#include "botmine/util.hpp"

namespace botmine {

// One chatbot: a repository scope plus the files that define and implement it.
struct ChatbotUnit {
    std::string id;       // "<owner>/<name>#<folder>"
    std::string repo_id;  // "<owner>/<name>"
    std::string folder;   // repo-relative, "." for the repository root
    std::vector<std::string> domain_files;
    std::vector<std::string> action_files;
    std::vector<std::string> readme_files;
};

inline std::string unit_id(const std::string& repo_id, const std::string& folder) {
    return repo_id + "#" + folder;
}

// Groups valid domain files by the directory that directly contains them;
// each directory becomes one chatbot.
inline std::vector<ChatbotUnit> partition_into_units(const std::string& repo_id,
                                                     std::vector<std::string> valid_domains) {
    if (valid_domains.empty()) {
        throw PreconditionError("partition_into_units requires at least one domain file");
    }
    std::map<std::string, std::vector<std::string>> by_folder;
    for (auto& rel : valid_domains) by_folder[parent_dir(rel)].push_back(rel);

    std::vector<ChatbotUnit> units;
    for (auto& [folder, files] : by_folder) {
        std::sort(files.begin(), files.end());
        ChatbotUnit u;
        u.id = unit_id(repo_id, folder);
        u.repo_id = repo_id;
        u.folder = folder;
        u.domain_files = std::move(files);
        units.push_back(std::move(u));
    }
    return units;  // std::map iteration is already sorted by folder
}

namespace detail {

inline bool in_folder(const std::string& rel, const std::string& folder) {
    return folder == "." || rel == folder || starts_with(rel, folder + "/");
}

inline bool is_readme(const std::string& rel) {
    std::string base = to_lower(basename_of(rel));
    return base == "readme" || starts_with(base, "readme.");
}

// Backend action file: conventional "actions*.py" name, or a Python source
// defining a subclass of the Rasa action base.
inline bool is_action_file(const std::string& rel, const std::string& content) {
    if (extension_lower(rel) != ".py") return false;
    if (starts_with(to_lower(basename_of(rel)), "actions")) return true;
    static const std::regex action_subclass(R"(class\s+\w+\s*\([^)]*Action)");
    return std::regex_search(content, action_subclass);
}

}  // namespace detail

inline ChatbotUnit attach_support_files(ChatbotUnit unit, const fs::path& tree_root) {
    unit.action_files.clear();
    unit.readme_files.clear();
    std::vector<std::string> folder_readmes;
    for (const auto& rel : list_files(tree_root)) {
        bool inside = detail::in_folder(rel, unit.folder);
        if (inside && extension_lower(rel) == ".py") {
            std::string content;
            try {
                content = read_file(tree_root / rel);
            } catch (const IoError&) {
                continue;
            }
            if (detail::is_action_file(rel, content)) unit.action_files.push_back(rel);
        }
        if (detail::is_readme(rel)) {
            if (parent_dir(rel) == ".") {
                unit.readme_files.push_back(rel);  // repository-root README first
            } else if (inside) {
                folder_readmes.push_back(rel);
            }
        }
    }
    unit.readme_files.insert(unit.readme_files.end(), folder_readmes.begin(),
                             folder_readmes.end());
    return unit;
}

}  // namespace botmine
