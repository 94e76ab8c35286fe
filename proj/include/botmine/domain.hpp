#pragma once

#include <map>
#include <optional>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "botmine/types.hpp"
#include "botmine/util.hpp"
#include "botmine/version.hpp"

namespace botmine {

// Domain file parses as YAML but violates the expected shape.
struct SemanticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Conversational parameters extracted from one or more domain files.
struct DomainModel {
    std::set<std::string> intents;
    std::set<std::string> entities;
    std::map<std::string, std::string> slots;  // name -> declared type
    std::set<std::string> actions;
    std::set<std::string> custom_actions;
    std::set<std::string> response_actions;
    std::map<std::string, std::vector<std::string>> responses;
    std::optional<std::string> version;
    std::string version_source = "none";  // "domain" | "dependency_pin" | "none"
};

inline const std::set<std::string>& slot_type_vocabulary() {
    static const std::set<std::string> vocab{"text", "bool", "categorical",
                                             "float", "list", "any"};
    return vocab;
}

namespace detail {

inline std::string scalar_or_throw(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) throw SemanticError(what + " is not a scalar");
    return n.as<std::string>();
}

// Accepts a scalar name or a single-key mapping (name plus flags).
inline std::string entry_name(const YAML::Node& n, const std::string& family) {
    if (n.IsScalar()) return n.as<std::string>();
    if (n.IsMap() && n.size() == 1) {
        return scalar_or_throw(n.begin()->first, family + " entry key");
    }
    throw SemanticError(family + " entry is neither a string nor a single-key mapping");
}

inline void parse_doc(const YAML::Node& doc, DomainModel& model) {
    if (!doc.IsMap()) return;

    if (auto n = doc["intents"]; n && !n.IsNull()) {
        if (!n.IsSequence()) throw SemanticError("intents is not a list");
        for (const auto& e : n) model.intents.insert(entry_name(e, "intents"));
    }
    if (auto n = doc["entities"]; n && !n.IsNull()) {
        if (!n.IsSequence()) throw SemanticError("entities is not a list");
        for (const auto& e : n) model.entities.insert(entry_name(e, "entities"));
    }
    if (auto n = doc["slots"]; n && !n.IsNull()) {
        if (!n.IsMap()) throw SemanticError("slots is not a mapping");
        for (const auto& kv : n) {
            std::string name = scalar_or_throw(kv.first, "slot name");
            if (!kv.second.IsMap()) throw SemanticError("slot '" + name + "' has no mapping body");
            auto type_node = kv.second["type"];
            if (!type_node || !type_node.IsScalar()) {
                throw SemanticError("slot '" + name + "' has no declared type");
            }
            std::string type = type_node.as<std::string>();
            if (!slot_type_vocabulary().count(type)) {
                throw SemanticError("slot '" + name + "' has unknown type '" + type + "'");
            }
            model.slots.emplace(name, type);
        }
    }
    if (auto n = doc["actions"]; n && !n.IsNull()) {
        if (!n.IsSequence()) throw SemanticError("actions is not a list");
        for (const auto& e : n) model.actions.insert(scalar_or_throw(e, "actions entry"));
    }
    if (auto n = doc["responses"]; n && !n.IsNull()) {
        if (!n.IsMap()) throw SemanticError("responses is not a mapping");
        for (const auto& kv : n) {
            std::string name = scalar_or_throw(kv.first, "response name");
            auto [it, inserted] = model.responses.emplace(name, std::vector<std::string>{});
            if (!kv.second || kv.second.IsNull()) continue;
            if (!kv.second.IsSequence()) {
                throw SemanticError("response '" + name + "' variations are not a list");
            }
            for (const auto& var : kv.second) {
                if (var.IsScalar()) {
                    it->second.push_back(var.as<std::string>());
                } else if (var.IsMap()) {
                    if (auto text = var["text"]; text && text.IsScalar()) {
                        it->second.push_back(text.as<std::string>());
                    }
                }
            }
        }
    }
    if (auto n = doc["version"]; n && n.IsScalar()) {
        std::string v = n.as<std::string>();
        if (!model.version || compare_versions(model.version, v) < 0) {
            model.version = v;
            model.version_source = "domain";
        }
    }
}

}  // namespace detail

inline DomainModel parse_domain_text(const std::string& yaml_text) {
    std::vector<YAML::Node> docs;
    try {
        docs = YAML::LoadAll(yaml_text);
    } catch (const YAML::Exception& e) {
        throw SemanticError(std::string("not parseable as YAML: ") + e.what());
    }
    DomainModel model;
    for (const auto& doc : docs) detail::parse_doc(doc, model);
    for (const auto& [name, _] : model.responses) model.actions.insert(name);
    for (const auto& a : model.actions) {
        if (starts_with(a, "utter_") || model.responses.count(a)) {
            model.response_actions.insert(a);
        } else {
            model.custom_actions.insert(a);
        }
    }
    return model;
}

inline DomainModel parse_domain(const fs::path& file) {
    return parse_domain_text(read_file(file));
}

enum class ReconcileKind { Single, Identical, DisjointMerged, Conflict };

struct ReconcileVerdict {
    ReconcileKind kind;
    std::optional<DomainModel> merged;
};

namespace detail {

inline bool families_equal(const DomainModel& a, const DomainModel& b) {
    return a.intents == b.intents && a.entities == b.entities && a.slots == b.slots &&
           a.actions == b.actions;
}

template <typename SetA, typename SetB>
bool keys_disjoint(const SetA& a, const SetB& b) {
    for (const auto& e : a) {
        if constexpr (requires { b.count(e); }) {
            if (b.count(e)) return false;
        }
    }
    return true;
}

inline bool families_disjoint(const DomainModel& a, const DomainModel& b) {
    if (!keys_disjoint(a.intents, b.intents)) return false;
    if (!keys_disjoint(a.entities, b.entities)) return false;
    for (const auto& [name, _] : a.slots) {
        if (b.slots.count(name)) return false;
    }
    return keys_disjoint(a.actions, b.actions);
}

}  // namespace detail

// Sanity check over all domain files of one chatbot: identical files collapse
// to one, fully disjoint files merge, anything in between is a Conflict.
inline ReconcileVerdict reconcile(const std::vector<DomainModel>& models) {
    if (models.empty()) throw PreconditionError("reconcile requires at least one model");
    if (models.size() == 1) return {ReconcileKind::Single, models[0]};

    bool all_equal = true;
    bool all_disjoint = true;
    for (size_t i = 0; i < models.size() && (all_equal || all_disjoint); ++i) {
        for (size_t j = i + 1; j < models.size(); ++j) {
            if (!detail::families_equal(models[i], models[j])) all_equal = false;
            if (!detail::families_disjoint(models[i], models[j])) all_disjoint = false;
        }
    }
    if (all_equal) return {ReconcileKind::Identical, models[0]};
    if (!all_disjoint) return {ReconcileKind::Conflict, std::nullopt};

    DomainModel merged;
    for (const auto& m : models) {
        merged.intents.insert(m.intents.begin(), m.intents.end());
        merged.entities.insert(m.entities.begin(), m.entities.end());
        merged.slots.insert(m.slots.begin(), m.slots.end());
        merged.actions.insert(m.actions.begin(), m.actions.end());
        merged.custom_actions.insert(m.custom_actions.begin(), m.custom_actions.end());
        merged.response_actions.insert(m.response_actions.begin(), m.response_actions.end());
        merged.responses.insert(m.responses.begin(), m.responses.end());
        if (compare_versions(merged.version, m.version) < 0) {
            merged.version = m.version;
            merged.version_source = m.version_source;
        }
    }
    return {ReconcileKind::DisjointMerged, merged};
}

// Rasa dependency pin from requirements-style metadata, used as a
// low-confidence version fallback when domain files declare none.
inline std::optional<std::string> find_dependency_pin(const fs::path& tree_root,
                                                      const std::string& unit_folder) {
    static const std::regex pin_re(
        R"((?:^|[^A-Za-z0-9_\-])rasa(?:\[[^\]]*\])?\s*(?:==|~=|>=)\s*([0-9]+(?:\.[0-9]+)*))",
        std::regex::icase);
    auto is_metadata_file = [](const std::string& base_lower) {
        return starts_with(base_lower, "requirements") || base_lower == "pipfile" ||
               base_lower == "setup.py" || base_lower == "pyproject.toml" ||
               base_lower == "environment.yml" || base_lower == "environment.yaml";
    };
    std::vector<std::string> candidates;
    for (const auto& rel : list_files(tree_root)) {
        if (!is_metadata_file(to_lower(basename_of(rel)))) continue;
        std::string dir = parent_dir(rel);
        bool in_scope = dir == "." || dir == unit_folder ||
                        starts_with(dir + "/", unit_folder == "." ? "" : unit_folder + "/");
        if (in_scope) candidates.push_back(rel);
    }
    // Unit-local files take precedence over repository-root ones.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const std::string& a, const std::string& b) {
                         bool ra = parent_dir(a) == ".", rb = parent_dir(b) == ".";
                         return ra < rb;
                     });
    for (const auto& rel : candidates) {
        std::string text;
        try {
            text = read_file(tree_root / rel);
        } catch (const IoError&) {
            continue;
        }
        std::smatch m;
        if (std::regex_search(text, m, pin_re)) return m[1].str();
    }
    return std::nullopt;
}

}  // namespace botmine
