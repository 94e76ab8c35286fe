#pragma once

#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "botmine/domain.hpp"
#include "botmine/language.hpp"
#include "botmine/similarity.hpp"
#include "botmine/types.hpp"
#include "botmine/version.hpp"

namespace botmine {

// Sorted parameter lists that make two chatbots candidates for being copies.
struct ConversationalSignature {
    std::vector<std::string> intents;
    std::vector<std::string> entities;
    std::vector<std::pair<std::string, std::string>> slots;
    std::vector<std::string> actions;
    std::vector<std::string> languages;

    auto tie() const { return std::tie(intents, entities, slots, actions, languages); }
    bool operator==(const ConversationalSignature& o) const { return tie() == o.tie(); }
    bool operator<(const ConversationalSignature& o) const { return tie() < o.tie(); }
};

inline ConversationalSignature make_signature(const DomainModel& model,
                                              const LanguageAnnotation& langs) {
    ConversationalSignature s;
    s.intents.assign(model.intents.begin(), model.intents.end());
    s.entities.assign(model.entities.begin(), model.entities.end());
    s.slots.assign(model.slots.begin(), model.slots.end());
    s.actions.assign(model.actions.begin(), model.actions.end());
    s.languages.assign(langs.overall.begin(), langs.overall.end());
    return s;
}

// Action file contents keyed by unit-folder-relative path.
using ActionCode = std::map<std::string, std::string>;

// Length-weighted mean of per-file sequence ratios. Differing file sets score
// zero; two units without action files are vacuously identical.
inline double action_code_similarity(const ActionCode& a, const ActionCode& b) {
    if (a.size() != b.size()) return 0.0;
    for (const auto& [name, _] : a) {
        if (!b.count(name)) return 0.0;
    }
    if (a.empty()) return 1.0;
    double weighted = 0.0;
    double total = 0.0;
    for (const auto& [name, text_a] : a) {
        const std::string& text_b = b.at(name);
        double weight = static_cast<double>(text_a.size() + text_b.size());
        weighted += weight * sequence_ratio(text_a, text_b);
        total += weight;
    }
    if (total == 0.0) return 1.0;  // all files empty on both sides
    return weighted / total;
}

struct DedupEntry {
    std::string unit_id;
    ConversationalSignature signature;
    ActionCode action_code;
};

struct DuplicateGroup {
    std::vector<std::string> members;  // sorted unit ids
    std::string keeper;
    double min_similarity = 1.0;  // over all member pairs
};

// Copies: equal signature and pairwise similarity at or above the threshold,
// closed transitively within each signature bucket. Singletons are dropped.
inline std::vector<DuplicateGroup> group_copies(const std::vector<DedupEntry>& entries,
                                                double threshold = 0.95) {
    std::map<ConversationalSignature, std::vector<size_t>> buckets;
    for (size_t i = 0; i < entries.size(); ++i) buckets[entries[i].signature].push_back(i);

    std::vector<DuplicateGroup> groups;
    for (auto& [_, bucket] : buckets) {
        if (bucket.size() < 2) continue;
        std::sort(bucket.begin(), bucket.end(), [&](size_t x, size_t y) {
            return entries[x].unit_id < entries[y].unit_id;
        });
        size_t n = bucket.size();
        std::vector<size_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<size_t(size_t)> find = [&](size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        std::vector<std::vector<double>> sim(n, std::vector<double>(n, 1.0));
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) {
                sim[i][j] = sim[j][i] = action_code_similarity(entries[bucket[i]].action_code,
                                                               entries[bucket[j]].action_code);
                if (sim[i][j] >= threshold) parent[find(i)] = find(j);
            }
        }
        std::map<size_t, std::vector<size_t>> components;
        for (size_t i = 0; i < n; ++i) components[find(i)].push_back(i);
        for (const auto& [_, comp] : components) {
            if (comp.size() < 2) continue;
            DuplicateGroup g;
            for (size_t i : comp) g.members.push_back(entries[bucket[i]].unit_id);
            std::sort(g.members.begin(), g.members.end());
            for (size_t x = 0; x < comp.size(); ++x) {
                for (size_t y = x + 1; y < comp.size(); ++y) {
                    g.min_similarity = std::min(g.min_similarity, sim[comp[x]][comp[y]]);
                }
            }
            groups.push_back(std::move(g));
        }
    }
    std::sort(groups.begin(), groups.end(), [](const DuplicateGroup& a, const DuplicateGroup& b) {
        return a.members[0] < b.members[0];
    });
    return groups;
}

// Decorations consulted when choosing which copy to keep.
struct KeeperKey {
    std::optional<std::string> rasa_version;
    long popularity = 0;  // stars + forks
    std::string created_at;
    std::string unit_id;
};

// Ordered criteria: newest Rasa version, then popularity, then the earliest
// created (original) repository, then unit id as the final tiebreak.
inline bool keeper_preferred(const KeeperKey& a, const KeeperKey& b) {
    int vc = compare_versions(a.rasa_version, b.rasa_version);
    if (vc != 0) return vc > 0;
    if (a.popularity != b.popularity) return a.popularity > b.popularity;
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.unit_id < b.unit_id;
}

inline std::string select_keeper(const std::vector<std::string>& members,
                                 const std::map<std::string, KeeperKey>& keys) {
    if (members.empty()) throw PreconditionError("select_keeper requires a non-empty group");
    KeeperKey best;
    bool first = true;
    for (const auto& id : members) {
        KeeperKey k = keys.at(id);
        k.unit_id = id;
        if (first || keeper_preferred(k, best)) {
            best = std::move(k);
            first = false;
        }
    }
    return best.unit_id;
}

}  // namespace botmine
