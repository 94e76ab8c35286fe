#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace botmine {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& p, const std::string& content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    out << content;
    if (!out) throw IoError("short write to " + p.string());
}

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) a++;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) b--;
    return s.substr(a, b - a);
}

inline std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

inline std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, delim)) out.push_back(cur);
    return out;
}

inline std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur)) {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        out.push_back(cur);
    }
    return out;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

inline bool starts_with(const std::string& s, const std::string& prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

// Repository-relative path with '/' separators, "." for the root itself.
inline std::string rel_slash(const fs::path& p, const fs::path& base) {
    std::string s = p.lexically_relative(base).generic_string();
    return s.empty() ? "." : s;
}

// Lists regular files under root, repo-relative slash paths, sorted.
inline std::vector<std::string> list_files(const fs::path& root) {
    std::vector<std::string> out;
    if (!fs::exists(root)) return out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out.push_back(rel_slash(e.path(), root));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Directory part of a repo-relative slash path; "." when at the root.
inline std::string parent_dir(const std::string& rel) {
    auto pos = rel.find_last_of('/');
    return pos == std::string::npos ? "." : rel.substr(0, pos);
}

inline std::string basename_of(const std::string& rel) {
    auto pos = rel.find_last_of('/');
    return pos == std::string::npos ? rel : rel.substr(pos + 1);
}

inline std::string extension_lower(const std::string& rel) {
    std::string base = basename_of(rel);
    auto pos = base.find_last_of('.');
    return pos == std::string::npos ? "" : to_lower(base.substr(pos));
}

// Collects per-stage warnings and dropped items with reasons.
struct StageLog {
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, std::string>> drops;  // (item id, reason)

    void warn(std::string msg) { warnings.push_back(std::move(msg)); }
    void drop(std::string id, std::string reason) {
        drops.emplace_back(std::move(id), std::move(reason));
    }
};

}  // namespace botmine
