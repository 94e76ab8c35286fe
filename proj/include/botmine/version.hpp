#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

namespace botmine {

// Dotted numeric version ("3.1", "2.8.14"). Non-numeric strings parse to
// nullopt and compare as absent.
inline std::optional<std::vector<long>> parse_version(const std::string& raw) {
    std::string s = raw;
    if (!s.empty() && (s[0] == 'v' || s[0] == 'V')) s.erase(0, 1);
    if (s.empty()) return std::nullopt;
    std::vector<long> parts;
    std::string cur;
    for (char c : s + ".") {
        if (c == '.') {
            if (cur.empty()) return std::nullopt;
            parts.push_back(std::stol(cur));
            cur.clear();
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            cur += c;
        } else {
            return std::nullopt;
        }
    }
    return parts;
}

inline std::optional<long> version_major(const std::optional<std::string>& v) {
    if (!v) return std::nullopt;
    auto parsed = parse_version(*v);
    if (!parsed || parsed->empty()) return std::nullopt;
    return (*parsed)[0];
}

// -1 / 0 / +1; absent or unparseable loses to any parseable version.
inline int compare_versions(const std::optional<std::string>& a,
                            const std::optional<std::string>& b) {
    auto pa = a ? parse_version(*a) : std::nullopt;
    auto pb = b ? parse_version(*b) : std::nullopt;
    if (!pa && !pb) return 0;
    if (!pa) return -1;
    if (!pb) return 1;
    size_t n = std::max(pa->size(), pb->size());
    for (size_t i = 0; i < n; ++i) {
        long x = i < pa->size() ? (*pa)[i] : 0;
        long y = i < pb->size() ? (*pb)[i] : 0;
        if (x != y) return x < y ? -1 : 1;
    }
    return 0;
}

}  // namespace botmine
